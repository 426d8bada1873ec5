"""Reductions of joint states to per-mode photon statistics.

Everything here consumes a JointState produced by the block evolution.  The
block structure makes reductions cheap: tracing out all modes but one turns
each block into a probability profile over its conversion number k, and the
pump mixture weights combine profiles convexly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import MixedPumpUnsupported, VacuumStatistics
from .evolution import JointState
from .fock_core import DensityMatrix, PumpSpec, TruncatedMode, distribution_g2, factorial_moment
from .pdc_models import MULTI_MODE, SINGLE_MODE

MODE_LABELS = ("signal", "idler", "down_converted", "pump")
_JTH = re.compile(r"jth\((\d+)\)\Z")


@dataclass(frozen=True)
class PhotonDistribution:
    """Photon-number probabilities of one mode (index = photon number)."""

    probabilities: np.ndarray
    mode_label: str

    def __post_init__(self) -> None:
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probabilities must be a nonempty vector")
        if float(p.min()) < 0.0:
            raise ValueError(f"negative probability {p.min()!r}")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        if self.mode_label not in MODE_LABELS and not _JTH.match(self.mode_label):
            raise ValueError(f"unknown mode label {self.mode_label!r}")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def mean(self) -> float:
        return float(np.dot(np.arange(self.probabilities.size), self.probabilities))

    def g2(self, floor: float = 1e-300) -> float:
        return distribution_g2(self.probabilities, floor=floor)


def _conversion_profile(state: JointState) -> np.ndarray:
    """Probability of k conversion events, mixing blocks by pump weight."""
    cutoff = state.pump.cutoff
    p = np.zeros(cutoff + 1)
    for w, block in zip(state.pump.weights, state.blocks):
        if w:
            p[: block.m + 1] += w * block.probabilities()
    return p


def reduce_signal(state: JointState, mode_label: str = "signal") -> PhotonDistribution:
    """Photon-number distribution of one down-converted mode (multi-mode).

    Signal, idler and every other down-converted mode share this
    distribution: each conversion event adds one photon to all of them.
    """
    if state.model.process != MULTI_MODE:
        raise ValueError("reduce_signal applies to multi-mode models; "
                         "use reduce_single_mode")
    return PhotonDistribution(_conversion_profile(state), mode_label)


def reduce_idler(state: JointState) -> PhotonDistribution:
    return reduce_signal(state, mode_label="idler")


def reduce_jth(state: JointState, j: int) -> PhotonDistribution:
    """Distribution of the j-th down-converted mode, 1-based."""
    if not 1 <= int(j) <= state.model.n:
        raise ValueError(f"mode index {j} outside 1..{state.model.n}")
    return reduce_signal(state, mode_label=f"jth({int(j)})")


def reduce_pump(state: JointState) -> PhotonDistribution:
    """Photon-number distribution left in the pump mode."""
    cutoff = state.pump.cutoff
    p = np.zeros(cutoff + 1)
    for w, block in zip(state.pump.weights, state.blocks):
        if w:
            # block k leaves m-k pump photons
            p[block.m::-1] += w * block.probabilities()
    return PhotonDistribution(p, "pump")


def reduce_single_mode(state: JointState) -> PhotonDistribution:
    """Distribution of the single down-converted mode; support on multiples of n."""
    if state.model.process != SINGLE_MODE:
        raise ValueError("reduce_single_mode applies to single-mode models")
    n = state.model.n
    profile = _conversion_profile(state)
    p = np.zeros(n * state.pump.cutoff + 1)
    p[::n] = profile
    return PhotonDistribution(p, "down_converted")


@dataclass(frozen=True)
class PairDensity:
    """Joint down-converted state in the equal-occupation basis |k, k, ...>.

    Validated as a density matrix: Hermitian, unit trace, positive
    semidefinite within the package floors.
    """

    density: DensityMatrix

    @property
    def entries(self) -> np.ndarray:
        return self.density.matrix

    def diagonal(self) -> np.ndarray:
        return self.density.diagonal()


def reduce_pair(state: JointState) -> PairDensity:
    """Trace out the pump, keeping coherences between conversion numbers.

    Coherence (k, k') survives only between pump components m and m+k'-k,
    so a pure pump with spread over Fock numbers is required; mixed pumps
    expose only the diagonal and are rejected here.
    """
    if state.model.process != MULTI_MODE:
        raise ValueError("reduce_pair applies to multi-mode models")
    if not state.pump.is_pure:
        raise MixedPumpUnsupported(
            "pair coherences are defined for pure pumps; "
            "diagonal statistics remain available via reduce_signal"
        )
    c = state.pump_coeffs
    cutoff = state.pump.cutoff
    rho = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    # diagonal via the shared profile so it matches reduce_signal bitwise
    np.fill_diagonal(rho, _conversion_profile(state))
    for k in range(cutoff + 1):
        for kp in range(cutoff + 1):
            if kp == k:
                continue
            shift = kp - k
            total = 0.0 + 0.0j
            for m in range(k, cutoff + 1 - max(shift, 0)):
                mp = m + shift
                total += (
                    c[m]
                    * np.conj(c[mp])
                    * state.blocks[m].u[k]
                    * np.conj(state.blocks[mp].u[kp])
                )
            rho[k, kp] = total
    return PairDensity(DensityMatrix(rho, (TruncatedMode(cutoff),)))


def g2_signal(state: JointState, floor: float = 1e-300) -> float:
    """Zero-delay second-order correlation of the signal mode."""
    return reduce_signal(state).g2(floor=floor)


def g2_single(state: JointState, floor: float = 1e-300) -> float:
    """Zero-delay second-order correlation of the single down-converted mode."""
    return reduce_single_mode(state).g2(floor=floor)


def gk_pump(pump: PumpSpec, k: int, floor: float = 1e-300) -> float:
    """Normalized k-th order pump correlation <a^dag^k a^k>/n_p^k, k in {2, 3}."""
    if k not in (2, 3):
        raise ValueError(f"pump correlations are provided for k in (2, 3), got {k}")
    n_p = pump.mean_photon
    if n_p <= floor:
        raise VacuumStatistics(f"pump mean photon number {n_p!r} at or below {floor}")
    return factorial_moment(pump, k) / n_p**k
