#pragma once

#include "onebit/numerics.hpp"

#include <filesystem>
#include <vector>

// Channel generation: a discrete physical model (planar-wave paths scattered
// off a single cluster between two square uniform planar arrays) and an
// i.i.d. Rayleigh alternative used by validation tests.

namespace onebit {

/// Square side x side uniform planar array with half-wavelength spacing.
struct ArrayGeometry {
  int side = 1;          // antenna count = side * side
  double spacing = 0.5;  // in wavelengths

  int antenna_count() const { return side * side; }
};

/// Cluster of point scatterers confined to a rectangular angular region
/// around its center. One scatterer per propagation path.
struct ScattererCluster {
  int path_count = 100;
  double azimuth_spread = 0.0;    // radians, full width
  double elevation_spread = 0.0;  // radians, full width
  double azimuth_center = 0.0;
  double elevation_center = 0.0;
};

struct AnglePair {
  double azimuth = 0.0;
  double elevation = 0.0;
};

struct SeedRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// One draw of the M x N channel matrix plus the geometry that produced it.
struct ChannelRealization {
  ComplexMatrix h;  // M x N
  ArrayGeometry geometry_tx;
  ArrayGeometry geometry_rx;
  ScattererCluster cluster;
  SeedRecord seed_record;
  bool iid = false;
};

/// Phase ramp of a planar wave across the array. The antenna at grid
/// position (p, q), p, q in {0 .. side-1}, occupies vector index
/// p * side + q and carries phase
///   2 pi spacing (p sin(el) + q cos(el) sin(az)),
/// the standard planar-array azimuth/elevation convention with broadside
/// along the array normal, so (az = el = 0) gives the all-ones vector.
/// Entries have unit magnitude.
ComplexVector upa_steering_vector(const ArrayGeometry& geometry,
                                  double azimuth, double elevation);

/// path_count (azimuth, elevation) pairs, each coordinate i.i.d. uniform on
/// [center - spread/2, center + spread/2]. Draw order is frozen: per path,
/// azimuth first, then elevation.
std::vector<AnglePair> draw_cluster_angles(RngStream& rng,
                                           const ScattererCluster& cluster);

/// H = sqrt(1/P) * sum_p g_p a_rx(theta_p^rx) a_tx(theta_p^tx)^H with path
/// gains g_p i.i.d. CN(0, 1), so E|H_mn|^2 = 1. Transmit- and receive-side
/// angles of a path are drawn independently within the shared cluster
/// region. Stream consumption order: tx angles, rx angles, gains.
ChannelRealization generate_physical_channel(RngStream& rng,
                                             const ArrayGeometry& geo_tx,
                                             const ArrayGeometry& geo_rx,
                                             const ScattererCluster& cluster);

/// M x N matrix with i.i.d. CN(0, 1) entries, filled column by column.
ChannelRealization generate_iid_channel(RngStream& rng, int m_rx, int n_tx);

// Binary dump for cross-implementation regression tests. Little-endian:
//   bytes 0..7   magic "OB1CHDMP"
//   u32          format version (1)
//   u64 rows, u64 cols, u64 seed, u64 stream_id
//   rows*cols*2 f64, row-major, interleaved re/im
void save_channel_dump(const ChannelRealization& ch,
                       const std::filesystem::path& path);
ChannelRealization load_channel_dump(const std::filesystem::path& path);

}  // namespace onebit
