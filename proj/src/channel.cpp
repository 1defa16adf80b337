#include "onebit/channel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace onebit {

namespace {

constexpr char kDumpMagic[8] = {'O', 'B', '1', 'C', 'H', 'D', 'M', 'P'};
constexpr std::uint32_t kDumpVersion = 1;

void validate_geometry(const ArrayGeometry& g) {
  if (g.side < 1)
    throw std::invalid_argument("ArrayGeometry: side must be >= 1");
  if (!(g.spacing > 0.0))
    throw std::invalid_argument("ArrayGeometry: spacing must be > 0");
}

void validate_cluster(const ScattererCluster& c) {
  if (c.path_count < 1)
    throw std::invalid_argument("ScattererCluster: path_count must be >= 1");
  if (!(c.azimuth_spread > 0.0) || !(c.elevation_spread > 0.0))
    throw std::invalid_argument("ScattererCluster: spreads must be > 0");
}

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

ComplexVector upa_steering_vector(const ArrayGeometry& geometry,
                                  double azimuth, double elevation) {
  validate_geometry(geometry);
  const int side = geometry.side;
  // Directional cosines on the two array axes; both are first order in the
  // angles, so an equal azimuth/elevation spread is seen equally by both.
  const double u = std::sin(elevation);
  const double v = std::cos(elevation) * std::sin(azimuth);
  const double scale = 2.0 * std::numbers::pi * geometry.spacing;

  ComplexVector a(geometry.antenna_count());
  for (int p = 0; p < side; ++p) {
    for (int q = 0; q < side; ++q) {
      const double phase = scale * (p * u + q * v);
      a(p * side + q) = {std::cos(phase), std::sin(phase)};
    }
  }
  return a;
}

std::vector<AnglePair> draw_cluster_angles(RngStream& rng,
                                           const ScattererCluster& cluster) {
  validate_cluster(cluster);
  std::vector<AnglePair> angles(cluster.path_count);
  for (auto& pair : angles) {
    pair.azimuth = rng.next_uniform(
        cluster.azimuth_center - 0.5 * cluster.azimuth_spread,
        cluster.azimuth_center + 0.5 * cluster.azimuth_spread);
    pair.elevation = rng.next_uniform(
        cluster.elevation_center - 0.5 * cluster.elevation_spread,
        cluster.elevation_center + 0.5 * cluster.elevation_spread);
  }
  return angles;
}

ChannelRealization generate_physical_channel(RngStream& rng,
                                             const ArrayGeometry& geo_tx,
                                             const ArrayGeometry& geo_rx,
                                             const ScattererCluster& cluster) {
  validate_geometry(geo_tx);
  validate_geometry(geo_rx);
  validate_cluster(cluster);

  const int n = geo_tx.antenna_count();
  const int m = geo_rx.antenna_count();
  const int paths = cluster.path_count;

  const auto angles_tx = draw_cluster_angles(rng, cluster);
  const auto angles_rx = draw_cluster_angles(rng, cluster);

  ComplexMatrix steer_tx(n, paths);
  ComplexMatrix steer_rx(m, paths);
  for (int p = 0; p < paths; ++p) {
    steer_tx.col(p) =
        upa_steering_vector(geo_tx, angles_tx[p].azimuth, angles_tx[p].elevation);
    steer_rx.col(p) =
        upa_steering_vector(geo_rx, angles_rx[p].azimuth, angles_rx[p].elevation);
  }

  ComplexVector gains(paths);
  for (int p = 0; p < paths; ++p) gains(p) = rng.next_complex_gaussian();
  gains *= 1.0 / std::sqrt(static_cast<double>(paths));

  ChannelRealization ch;
  ch.h = steer_rx * (gains.asDiagonal() * steer_tx.adjoint());
  ch.geometry_tx = geo_tx;
  ch.geometry_rx = geo_rx;
  ch.cluster = cluster;
  ch.seed_record = {rng.seed(), rng.stream_id()};
  return ch;
}

ChannelRealization generate_iid_channel(RngStream& rng, int m_rx, int n_tx) {
  if (m_rx < 1 || n_tx < 1)
    throw std::invalid_argument("generate_iid_channel: dimensions must be >= 1");
  ChannelRealization ch;
  ch.h = sample_complex_gaussian_matrix(rng, m_rx, n_tx);
  ch.seed_record = {rng.seed(), rng.stream_id()};
  ch.iid = true;
  return ch;
}

void save_channel_dump(const ChannelRealization& ch,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("save_channel_dump: cannot open " + path.string());

  out.write(kDumpMagic, sizeof(kDumpMagic));
  write_raw(out, kDumpVersion);
  write_raw(out, static_cast<std::uint64_t>(ch.h.rows()));
  write_raw(out, static_cast<std::uint64_t>(ch.h.cols()));
  write_raw(out, ch.seed_record.seed);
  write_raw(out, ch.seed_record.stream_id);
  for (Eigen::Index i = 0; i < ch.h.rows(); ++i) {
    for (Eigen::Index j = 0; j < ch.h.cols(); ++j) {
      write_raw(out, ch.h(i, j).real());
      write_raw(out, ch.h(i, j).imag());
    }
  }
  if (!out)
    throw std::runtime_error("save_channel_dump: write failed for " +
                             path.string());
}

ChannelRealization load_channel_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("load_channel_dump: cannot open " + path.string());

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kDumpMagic, sizeof(magic)) != 0)
    throw std::runtime_error("load_channel_dump: bad magic in " + path.string());
  const auto version = read_raw<std::uint32_t>(in);
  if (version != kDumpVersion)
    throw std::runtime_error("load_channel_dump: unsupported version " +
                             std::to_string(version));

  const auto rows = read_raw<std::uint64_t>(in);
  const auto cols = read_raw<std::uint64_t>(in);
  ChannelRealization ch;
  ch.seed_record.seed = read_raw<std::uint64_t>(in);
  ch.seed_record.stream_id = read_raw<std::uint64_t>(in);
  if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20))
    throw std::runtime_error("load_channel_dump: implausible dimensions in " +
                             path.string());

  ch.h.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < ch.h.rows(); ++i) {
    for (Eigen::Index j = 0; j < ch.h.cols(); ++j) {
      const double re = read_raw<double>(in);
      const double im = read_raw<double>(in);
      ch.h(i, j) = {re, im};
    }
  }
  if (!in)
    throw std::runtime_error("load_channel_dump: truncated file " +
                             path.string());
  return ch;
}

}  // namespace onebit
