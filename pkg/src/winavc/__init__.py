"""Windowed adversarial channels: capacities, codes, jammers, simulation."""

__version__ = "0.1.0"

from .capacity import (
    CapacityResult,
    WindowedCapacityVerdict,
    bitflip_list_capacity,
    list_capacity,
    oblivious_capacity,
    windowed_capacity_verdict,
)
from .codec import (
    CodecParams,
    DecodeResult,
    HashParams,
    JamBudget,
    KeyCode,
    ListCode,
    PhasePlan,
    ThreePhaseCodec,
    build_list_code,
    build_three_phase_codec,
    decode_three_phase,
    encode_three_phase,
    hamming_budget,
    interleave_allocation,
    list_decode,
    phase3_key_code,
    poly_hash,
)
from .core import (
    Alphabet,
    Channel,
    ConstraintSet,
    Distribution,
    EmpiricalType,
    InfeasibleSetError,
    WindowedAvcSpec,
    binary_convolution,
    binary_entropy,
    bitflip_spec,
    block_channel_sample,
    empirical_type,
    entropy,
    member,
    mutual_information,
)
from .harness import (
    ExperimentConfig,
    JammerParams,
    RunStats,
    TrialRecord,
    run_trials,
    sweep,
    wilson_interval,
)
from .jammers import (
    JamResult,
    JammerGenerationError,
    estimate_rejection_rate,
    iid_jammer,
    spoof_jammer,
    symmetrize_jammer,
)
from .symmetrize import (
    SymmetrizabilityResult,
    bitflip_symmetrizable,
    ecn_symmetrizable,
    gamma_prime,
    scan_nonsymmetrizable,
)
from .windows import (
    GuardWord,
    WindowReport,
    expurgate,
    guard_word,
    verify_windows,
)
