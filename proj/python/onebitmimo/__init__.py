"""Doubly 1-bit quantized massive MIMO link simulation.

Thin python wrapper over the C++ core: Bussgang linearization of a link with
1-bit DACs and ADCs, the closed-form approximate MSE and its optimal
combiner, physical/iid channel generation, and Monte Carlo MSE/SER sweeps.
"""

from onebitmimo._core import (  # noqa: F401
    LinkConfig,
    LinearizedLink,
    MseReport,
    QuantizerMode,
    RngStream,
    SerReport,
    __version__,
    mse_expansion_check,
    approximate_mse,
    approximate_mse_with,
    db_to_linear,
    detect_psk,
    elementwise_arcsine_map,
    estimate_ser,
    generate_iid_channel,
    generate_physical_channel,
    hermitian_solve,
    linearize_link,
    monte_carlo_mse,
    quantize_1bit,
    quantize_1bit_batch,
    run_experiment,
    sample_complex_gaussian,
    sample_complex_gaussian_cov,
    stable_hash,
    svd,
    thread_count,
    upa_steering_vector,
    wilson_interval,
)
