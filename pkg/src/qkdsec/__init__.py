"""Finite-key QKD security analysis toolkit.

Exact log-domain eavesdropper-success bounds, explicit small-dimension
classical-quantum state checks, GF(2) reconciliation and Toeplitz
privacy amplification, a deterministic BB84 session simulator, and a
finite-key rate model with two syndrome-hiding leakage accountings.
"""

from .bounds import (
    JointDistribution,
    SecurityParams,
    guessing_bound,
    guessing_floor,
    kpa_bound,
    near_miss_bound,
    otp_secrecy_table,
    pa_guess_bound,
    readable_key_count,
)
from .numerics import (
    Log2Value,
    binary_entropy,
    binomial_sum,
    hamming_max_info_bits,
    log2_binomial_sum,
    solve_parity_length,
)
from .postproc import (
    LinearCodeSpec,
    ToeplitzSeed,
    decode_by_syndrome,
    family_collision_rate,
    hamming_code,
    leak_conventional,
    leak_yuen,
    repetition_code,
    syndrome,
    toeplitz_hash,
)
from .qstate import (
    CqState,
    DensityMatrix,
    Povm,
    build_ideal_state,
    build_real_state,
    cq_trace_distance,
    guessing_probability,
    kpa_reduce,
    optimal_guess_classical,
    trace_distance,
)
from .rates import RateCurve, RateModelParams, rate_curve, secure_key_length
from .simulator import ProtocolConfig, SessionTranscript, empirical_eve_guess_rate, run_session

__version__ = "0.1.0"

__all__ = [
    "JointDistribution", "SecurityParams", "guessing_bound", "guessing_floor",
    "kpa_bound", "near_miss_bound", "otp_secrecy_table", "pa_guess_bound",
    "readable_key_count",
    "Log2Value", "binary_entropy", "binomial_sum", "hamming_max_info_bits",
    "log2_binomial_sum", "solve_parity_length",
    "LinearCodeSpec", "ToeplitzSeed", "decode_by_syndrome", "family_collision_rate",
    "hamming_code", "leak_conventional", "leak_yuen", "repetition_code",
    "syndrome", "toeplitz_hash",
    "CqState", "DensityMatrix", "Povm", "build_ideal_state", "build_real_state",
    "cq_trace_distance", "guessing_probability", "kpa_reduce",
    "optimal_guess_classical", "trace_distance",
    "RateCurve", "RateModelParams", "rate_curve", "secure_key_length",
    "ProtocolConfig", "SessionTranscript", "empirical_eve_guess_rate", "run_session",
    "__version__",
]
