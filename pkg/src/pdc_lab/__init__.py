"""pdc-lab: parametric down-conversion with a quantized pump.

Exact truncated-Fock-space evolution of pump plus down-converted modes,
photon-number statistics (g2(0), distributions, reduced density matrices),
and closed-form series/weak-limit predictions compared against the exact
numerics.
"""
from .analytics import (
    G2Report,
    Regime,
    compare,
    series_g2_multimode,
    series_g2_single,
    weak_g2_multimode,
    weak_g2_single,
)
from .errors import (
    ConfigError,
    DimensionOverflow,
    MixedPumpUnsupported,
    NegativeNorm,
    NonPositiveParameter,
    PdcLabError,
    SeriesDiverged,
    UnsupportedOrder,
    VacuumPump,
    VacuumStatistics,
)
from .evolution import (
    BlockAmplitudes,
    CoefficientOperatorTable,
    JointState,
    brute_force_evolve,
    coefficient_table,
    evolve_block,
    evolve_pump,
    joint_state_vector,
    series_block_amplitudes,
    series_state_amplitudes,
)
from .fock_core import (
    DensityMatrix,
    PumpSpec,
    StateVector,
    TruncatedMode,
    factorial_moment,
    g2_zero,
    ladder,
    partial_trace,
    tensor,
)
from .pdc_models import (
    BlockHamiltonian,
    CouplingParams,
    Frequencies,
    InteractionStrength,
    PdcModel,
    build_block_hamiltonian,
    build_full_hamiltonian,
    coupling_eta,
    interaction_strength,
    reachable_cutoffs,
)
from .photon_stats import (
    PairDensity,
    PhotonDistribution,
    g2_signal,
    g2_single,
    gk_pump,
    reduce_idler,
    reduce_jth,
    reduce_pair,
    reduce_pump,
    reduce_signal,
    reduce_single_mode,
)

__version__ = "0.1.0"

__all__ = [
    "BlockAmplitudes",
    "BlockHamiltonian",
    "CoefficientOperatorTable",
    "ConfigError",
    "CouplingParams",
    "DensityMatrix",
    "DimensionOverflow",
    "Frequencies",
    "G2Report",
    "InteractionStrength",
    "JointState",
    "MixedPumpUnsupported",
    "NegativeNorm",
    "NonPositiveParameter",
    "PairDensity",
    "PdcLabError",
    "PdcModel",
    "PhotonDistribution",
    "PumpSpec",
    "Regime",
    "SeriesDiverged",
    "StateVector",
    "TruncatedMode",
    "UnsupportedOrder",
    "VacuumPump",
    "VacuumStatistics",
    "brute_force_evolve",
    "build_block_hamiltonian",
    "build_full_hamiltonian",
    "coefficient_table",
    "compare",
    "coupling_eta",
    "evolve_block",
    "evolve_pump",
    "factorial_moment",
    "g2_signal",
    "g2_single",
    "g2_zero",
    "gk_pump",
    "interaction_strength",
    "joint_state_vector",
    "ladder",
    "partial_trace",
    "reachable_cutoffs",
    "reduce_idler",
    "reduce_jth",
    "reduce_pair",
    "reduce_pump",
    "reduce_signal",
    "reduce_single_mode",
    "series_block_amplitudes",
    "series_g2_multimode",
    "series_g2_single",
    "series_state_amplitudes",
    "tensor",
    "weak_g2_multimode",
    "weak_g2_single",
]
