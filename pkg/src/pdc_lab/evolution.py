"""Exact propagation and the fourth-order coefficient-operator engine.

Exact paths: per-block tridiagonal eigendecomposition (the workhorse) and a
dense matrix exponential over the full tensor grid (the oracle).  The series
path expands exp(-i theta H) to fourth order in theta as output-indexed
operators acting on the pump mode alone; their coefficient tables are
hard-coded below for general n and were frozen only after matching a direct
Taylor enumeration of the full Hamiltonian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import MixedPumpUnsupported, NegativeNorm, UnsupportedOrder
from .fock_core import (
    PumpSpec,
    StateVector,
    composite_index,
    factorial_moment,
    falling_factorial,
    tensor,
)
from .pdc_models import (
    MULTI_MODE,
    SINGLE_MODE,
    BlockHamiltonian,
    PdcModel,
    _as_modes,
    build_block_hamiltonian,
    build_full_hamiltonian,
    reachable_cutoffs,
)

BLOCK_NORM_TOL = 1e-12

MAX_SERIES_ORDER = 4


@dataclass(frozen=True)
class BlockAmplitudes:
    """Evolved block for initial pump Fock number m.

    u[k] is the amplitude of |m-k, k, ..., k> (multi-mode) or |m-k, n*k>
    (single-mode) at interaction strength theta.
    """

    m: int
    u: np.ndarray
    theta: float

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=complex)
        if u.shape != (self.m + 1,):
            raise ValueError(f"expected {self.m + 1} amplitudes, got shape {u.shape}")
        norm = float(np.vdot(u, u).real)
        if abs(norm - 1.0) > BLOCK_NORM_TOL:
            raise ValueError(f"block norm^2 = {norm!r} deviates from 1")
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.u) ** 2


def evolve_block(h: BlockHamiltonian, theta: float) -> BlockAmplitudes:
    """exp(-i theta H_block) applied to the pump-full state e_0.

    Uses the real-symmetric tridiagonal eigendecomposition; solver failures
    propagate, amplitudes are never clamped.
    """
    theta = float(theta)
    if theta < 0.0:
        raise ValueError("theta must be >= 0")
    if h.m == 0 or theta == 0.0:
        u = np.zeros(h.m + 1, dtype=complex)
        u[0] = 1.0
        return BlockAmplitudes(h.m, u, theta)
    w, v = eigh_tridiagonal(h.diag, h.offdiag)
    u = v @ (np.exp(-1j * theta * w) * v[0, :])
    return BlockAmplitudes(h.m, u, theta)


@dataclass(frozen=True)
class JointState:
    """Pump-resolved evolution result: one BlockAmplitudes per Fock component.

    Mixed pumps are convex mixtures over their Fock components, so carrying
    every component's block covers pure and mixed cases alike.
    """

    model: PdcModel
    pump: PumpSpec
    blocks: tuple[BlockAmplitudes, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) != self.pump.cutoff + 1:
            raise ValueError("need one block per pump Fock component")
        for m, block in enumerate(self.blocks):
            if block.m != m:
                raise ValueError(f"block at position {m} evolved from m={block.m}")
        total = sum(
            w * float(np.vdot(b.u, b.u).real)
            for w, b in zip(self.pump.weights, self.blocks)
        )
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"global norm {total!r} deviates from 1")

    @property
    def theta(self) -> float:
        return self.blocks[0].theta if self.blocks else self.model.theta

    @property
    def pump_coeffs(self) -> np.ndarray:
        if not self.pump.is_pure:
            raise MixedPumpUnsupported(
                "mixed pumps carry weights, not coefficients; "
                "use .pump.weights for diagonal statistics"
            )
        return self.pump.coefficients


def evolve_pump(model: PdcModel, pump: PumpSpec, theta: float | None = None) -> JointState:
    """Evolve every pump Fock component through its invariant block."""
    theta = model.theta if theta is None else float(theta)
    blocks = tuple(
        evolve_block(build_block_hamiltonian(model, m), theta)
        for m in range(pump.cutoff + 1)
    )
    return JointState(model, pump, blocks)


def joint_state_vector(state: JointState) -> StateVector:
    """Assemble the full tensor-grid vector from the block decomposition.

    Pure pumps only; the layout is reachable_cutoffs(model, pump.cutoff).
    """
    coeffs = state.pump_coeffs
    modes = reachable_cutoffs(state.model, state.pump.cutoff)
    amps = np.zeros(math.prod(m.dim for m in modes), dtype=complex)
    n = state.model.n
    for m, block in enumerate(state.blocks):
        c = coeffs[m]
        if c == 0:
            continue
        for k in range(m + 1):
            if state.model.process == MULTI_MODE:
                occ = (m - k,) + (k,) * n
            else:
                occ = (m - k, n * k)
            amps[composite_index(modes, occ)] += c * block.u[k]
    return StateVector(amps, modes)


def brute_force_evolve(model: PdcModel, pump: PumpSpec, theta: float | None = None,
                       cutoffs=None, include_free_terms: bool = False) -> StateVector:
    """Reference evolution: dense Hermitian eigendecomposition on the full grid.

    No performance contract; exists to cross-check the block path and the
    free-term invariance of photon statistics.
    """
    if not pump.is_pure:
        raise MixedPumpUnsupported("brute-force path needs a pure pump state")
    theta = model.theta if theta is None else float(theta)
    if cutoffs is None:
        cutoffs = reachable_cutoffs(model, pump.cutoff)
    h = build_full_hamiltonian(model, cutoffs, include_free_terms=include_free_terms)
    modes = _as_modes(model, cutoffs)
    if modes[0].cutoff < pump.cutoff:
        raise ValueError(
            f"pump mode cutoff {modes[0].cutoff} cannot hold a pump with "
            f"cutoff {pump.cutoff}"
        )
    down_vacuum = [np.zeros(m.dim, dtype=complex) for m in modes[1:]]
    for v in down_vacuum:
        v[0] = 1.0
    pump_vec = np.zeros(modes[0].dim, dtype=complex)
    pump_vec[: pump.cutoff + 1] = pump.coefficients
    psi0 = tensor([pump_vec] + down_vacuum)
    w, v = np.linalg.eigh(h)
    psi = v @ (np.exp(-1j * theta * w) * (v.conj().T @ psi0))
    return StateVector(psi, modes)


class Term(NamedTuple):
    """One series term: coeff * theta**theta_power * a^dag^creation a^annihilation."""

    theta_power: int
    creation: int
    annihilation: int
    coeff: complex


@dataclass(frozen=True)
class CoefficientOperatorTable:
    """Output-indexed pump-operator expansion of the propagator.

    terms[j] lists the normally ordered pump operators whose action on the
    pump state multiplies the j-conversion output component; every term
    satisfies annihilation - creation = j and theta_power <= order.
    """

    process: str
    n: int
    order: int
    terms: tuple[tuple[Term, ...], ...]


def _multi_mode_terms(n: int) -> list[list[Term]]:
    two_n = 2.0**n
    r2 = 2.0 ** (n / 2.0)
    r6 = 6.0 ** (n / 2.0)
    r24 = 24.0 ** (n / 2.0)
    return [
        [
            Term(0, 0, 0, 1.0),
            Term(2, 1, 1, -0.5),
            Term(4, 1, 1, 1.0 / 24.0),
            Term(4, 2, 2, (1.0 + two_n) / 24.0),
        ],
        [
            Term(1, 0, 1, -1.0j),
            Term(3, 0, 1, 1.0j / 6.0),
            Term(3, 1, 2, 1.0j * (1.0 + two_n) / 6.0),
        ],
        [
            Term(2, 0, 2, -r2 / 2.0),
            Term(4, 0, 2, (2.0 + two_n) * r2 / 24.0),
            Term(4, 1, 3, r2 * (1.0 + two_n + 3.0**n) / 24.0),
        ],
        [Term(3, 0, 3, 1.0j * r6 / 6.0)],
        [Term(4, 0, 4, r24 / 24.0)],
    ]


def _single_mode_terms(n: int) -> list[list[Term]]:
    fn = math.factorial(n)
    f2n = math.factorial(2 * n)
    f3n = math.factorial(3 * n)
    f4n = math.factorial(4 * n)
    rfn = math.sqrt(fn)
    rf2n = math.sqrt(f2n)
    return [
        [
            Term(0, 0, 0, 1.0),
            Term(2, 1, 1, -fn / 2.0),
            Term(4, 1, 1, fn**2 / 24.0),
            Term(4, 2, 2, (f2n + fn**2) / 24.0),
        ],
        [
            Term(1, 0, 1, -1.0j * rfn),
            Term(3, 0, 1, 1.0j * fn * rfn / 6.0),
            Term(3, 1, 2, 1.0j * rfn * (f2n / fn + fn) / 6.0),
        ],
        [
            Term(2, 0, 2, -rf2n / 2.0),
            Term(4, 0, 2, rf2n * (f2n / fn + 2.0 * fn) / 24.0),
            Term(4, 1, 3, rf2n * (fn + f2n / fn + f3n / f2n) / 24.0),
        ],
        [Term(3, 0, 3, 1.0j * math.sqrt(f3n) / 6.0)],
        [Term(4, 0, 4, math.sqrt(f4n) / 24.0)],
    ]


def coefficient_table(process: str, n: int, order: int = 4) -> CoefficientOperatorTable:
    """Hard-coded fourth-order tables for either process at general n."""
    if order > MAX_SERIES_ORDER:
        raise UnsupportedOrder(
            f"series tables stop at theta^{MAX_SERIES_ORDER}, got order {order}"
        )
    if order < 0:
        raise ValueError("order must be nonnegative")
    if n < 2:
        raise ValueError(f"order n must be >= 2, got {n}")
    if process == MULTI_MODE:
        raw = _multi_mode_terms(n)
    elif process == SINGLE_MODE:
        raw = _single_mode_terms(n)
    else:
        raise ValueError(f"unknown process {process!r}")
    terms = tuple(
        tuple(t for t in per_j if t.theta_power <= order) for per_j in raw
    )
    return CoefficientOperatorTable(process, int(n), int(order), terms)


def series_block_amplitudes(table: CoefficientOperatorTable, m: int,
                            theta: float) -> np.ndarray:
    """Series prediction of the block amplitudes u_k for pump Fock input m.

    Entry j is the matrix element of the j-th table operator between |m> and
    |m-j>; exact evolve_block output converges to this as theta^(order+1).
    """
    m = int(m)
    theta = float(theta)
    u = np.zeros(m + 1, dtype=complex)
    for j, per_j in enumerate(table.terms):
        if j > m:
            break
        amp = 0.0 + 0.0j
        for t in per_j:
            weight = falling_factorial(m, t.annihilation) * falling_factorial(
                m - j, t.creation
            )
            if weight:
                amp += t.coeff * theta**t.theta_power * math.sqrt(weight)
        u[j] = amp
    return u


@dataclass(frozen=True)
class SeriesExpectations:
    """Diagonal expectations E_j of the table operators and their sum N.

    expectations[j] approximates the probability weight of the j-conversion
    output before normalization; norm is the truncated-series normalization
    constant (1 + O(theta^6) when the tables are consistent).
    """

    expectations: np.ndarray
    norm: float


def series_state_amplitudes(table: CoefficientOperatorTable, pump: PumpSpec,
                            theta: float) -> SeriesExpectations:
    """Evaluate E_j = <A_j^dag A_j> over the pump via factorial moments.

    The normally ordered product of two table terms reduces to pump
    factorial moments; the full term-by-term product is kept (no extra
    truncation in theta), so each E_j is a genuine operator expectation and
    is nonnegative up to rounding.
    """
    theta = float(theta)
    moments: dict[int, float] = {0: 1.0}

    def moment(k: int) -> float:
        if k not in moments:
            moments[k] = factorial_moment(pump, k)
        return moments[k]

    e = np.zeros(len(table.terms))
    for j, per_j in enumerate(table.terms):
        total = 0.0 + 0.0j
        for t1 in per_j:
            for t2 in per_j:
                # <a^dag^s1 a^r1 a^dag^r2 a^s2>, reordered term by term
                contraction = 0.0
                for i in range(min(t1.creation, t2.creation) + 1):
                    contraction += (
                        math.comb(t1.creation, i)
                        * math.comb(t2.creation, i)
                        * math.factorial(i)
                        * moment(t1.annihilation + t2.creation - i)
                    )
                total += (
                    np.conj(t1.coeff)
                    * t2.coeff
                    * theta ** (t1.theta_power + t2.theta_power)
                    * contraction
                )
        e[j] = total.real
    norm = float(e.sum())
    if norm <= 0.0:
        raise NegativeNorm(
            f"series normalization {norm!r} is not positive; "
            f"theta={theta} lies outside the series' validity"
        )
    return SeriesExpectations(e, norm)
