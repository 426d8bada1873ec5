"""Truncated Fock-space linear algebra.

States, ladder operators, tensor products, density matrices, partial traces
and factorial moments for a register of photon-number-truncated bosonic
modes.  Operators are plain complex ndarrays; the composite index convention
is "leftmost mode slowest-varying", i.e. exactly what ``numpy.kron`` produces
when modes are combined left to right.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionOverflow, VacuumStatistics

# Numerical contract for density matrices produced anywhere in the package.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10

NORM_TOL = 1e-12

DEFAULT_MAX_DIM = 2_000_000
_MAX_DIM_ENV = "PDC_LAB_MAX_DIM"

DEFAULT_TAIL_TOL = 1e-12
_MAX_AUTO_CUTOFF = 100_000


def max_composite_dim() -> int:
    """Composite-dimension guard, overridable via the PDC_LAB_MAX_DIM env var."""
    raw = os.environ.get(_MAX_DIM_ENV)
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(float(raw))
    except ValueError as exc:
        raise DimensionOverflow(f"cannot parse {_MAX_DIM_ENV}={raw!r}") from exc
    if value <= 0:
        raise DimensionOverflow(f"{_MAX_DIM_ENV} must be positive, got {value}")
    return value


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TruncatedMode:
    """One bosonic mode kept up to ``cutoff`` photons (dimension cutoff+1)."""

    cutoff: int

    def __post_init__(self) -> None:
        if not isinstance(self.cutoff, (int, np.integer)) or self.cutoff < 0:
            raise ValueError(f"cutoff must be a nonnegative integer, got {self.cutoff!r}")

    @property
    def dim(self) -> int:
        return self.cutoff + 1


def ladder(mode: TruncatedMode, which: str = "lower") -> np.ndarray:
    """Truncated annihilation ('lower') or creation ('raise') matrix.

    The annihilation operator carries sqrt(k) on the first superdiagonal,
    column k; the creation operator is its conjugate transpose.
    """
    a = np.diagflat(np.sqrt(np.arange(1, mode.dim)), 1).astype(complex)
    if which == "lower":
        return a
    if which == "raise":
        return a.conj().T
    raise ValueError(f"which must be 'lower' or 'raise', got {which!r}")


def number_operator(mode: TruncatedMode) -> np.ndarray:
    return np.diagflat(np.arange(mode.dim)).astype(complex)


def composite_index(modes: Sequence[TruncatedMode], occupation: Sequence[int]) -> int:
    """Flat index of the basis ket |n_0, n_1, ...> (leftmost slowest)."""
    if len(modes) != len(occupation):
        raise ValueError("occupation length does not match mode layout")
    idx = 0
    for mode, n in zip(modes, occupation):
        if not 0 <= n <= mode.cutoff:
            raise ValueError(f"occupation {n} outside [0, {mode.cutoff}]")
        idx = idx * mode.dim + n
    return idx


def _check_composite_dim(dim: int) -> None:
    limit = max_composite_dim()
    if dim > limit:
        raise DimensionOverflow(
            f"composite dimension {dim} exceeds the guard {limit} "
            f"(override with {_MAX_DIM_ENV})"
        )


def tensor(items: Iterable[np.ndarray]) -> np.ndarray:
    """Kronecker product of matrices or vectors, leftmost factor slowest.

    All items must share the same rank (all operators or all state vectors).
    The composite dimension is rejected beyond the configured guard.
    """
    factors = [np.asarray(x) for x in items]
    if not factors:
        raise ValueError("tensor of an empty list")
    ndim = factors[0].ndim
    if ndim not in (1, 2) or any(f.ndim != ndim for f in factors):
        raise ValueError("tensor factors must all be vectors or all matrices")
    dim = 1
    for f in factors:
        dim *= f.shape[0]
    _check_composite_dim(dim)
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


class StateVector:
    """Normalized pure state over an ordered register of truncated modes."""

    __slots__ = ("amplitudes", "modes")

    def __init__(self, amplitudes, modes: Sequence[TruncatedMode]):
        modes = tuple(modes)
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1).copy()
        dim = math.prod(m.dim for m in modes)
        if amps.size != dim:
            raise ValueError(f"amplitude length {amps.size} != layout dimension {dim}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm^2 = {norm!r} deviates from 1 beyond {NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "modes", modes)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density_matrix(self) -> "DensityMatrix":
        rho = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityMatrix(rho, self.modes)

    def probability(self, occupation: Sequence[int]) -> float:
        return float(abs(self.amplitudes[composite_index(self.modes, occupation)]) ** 2)


def basis_state(modes: Sequence[TruncatedMode], occupation: Sequence[int]) -> StateVector:
    modes = tuple(modes)
    amps = np.zeros(math.prod(m.dim for m in modes), dtype=complex)
    amps[composite_index(modes, occupation)] = 1.0
    return StateVector(amps, modes)


def _validated_density(matrix: np.ndarray) -> np.ndarray:
    """Enforce Hermiticity/trace/positivity floors; clip tiny negative modes.

    Eigenvalues in [EIGENVALUE_FLOOR, 0) are clipped to zero and the matrix
    renormalized; anything more negative is a real error, not noise.
    """
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("density matrix must be square")
    herm_dev = float(np.max(np.abs(matrix - matrix.conj().T)))
    if herm_dev > HERMITICITY_TOL:
        raise ValueError(f"matrix deviates from Hermitian by {herm_dev:.3e}")
    tr = complex(np.trace(matrix))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"trace {tr!r} deviates from 1 beyond {TRACE_TOL}")
    matrix = 0.5 * (matrix + matrix.conj().T)
    eigvals = np.linalg.eigvalsh(matrix)
    lo = float(eigvals.min())
    if lo < EIGENVALUE_FLOOR:
        raise ValueError(f"eigenvalue {lo:.3e} below the floor {EIGENVALUE_FLOOR}")
    if lo < 0.0:
        w, v = np.linalg.eigh(matrix)
        w = np.clip(w, 0.0, None)
        w /= w.sum()
        matrix = (v * w) @ v.conj().T
    return matrix


class DensityMatrix:
    """Validated density matrix over an ordered register of truncated modes."""

    __slots__ = ("matrix", "modes")

    def __init__(self, matrix, modes: Sequence[TruncatedMode]):
        modes = tuple(modes)
        mat = np.asarray(matrix, dtype=complex).copy()
        dim = math.prod(m.dim for m in modes)
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {mat.shape} != layout dimension {dim}")
        mat = _validated_density(mat)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "modes", modes)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix over the kept modes (ascending layout order)."""
    nmodes = len(rho.modes)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one mode")
    if keep[0] < 0 or keep[-1] >= nmodes:
        raise ValueError(f"mode indices {keep} outside layout of {nmodes} modes")
    dims = [m.dim for m in rho.modes]
    t = rho.matrix.reshape(dims + dims)
    # trace out dropped modes from the right so earlier axis numbers stay valid
    remaining = nmodes
    for idx in sorted(set(range(nmodes)) - set(keep), reverse=True):
        t = np.trace(t, axis1=idx, axis2=idx + remaining)
        remaining -= 1
    dim_keep = math.prod(dims[k] for k in keep)
    reduced = t.reshape(dim_keep, dim_keep)
    return DensityMatrix(reduced, [rho.modes[k] for k in keep])


class PumpSpec:
    """Pump field-mode state in the Fock basis.

    Pure kinds ('coherent', 'fock', 'custom') carry complex coefficients;
    'thermal' is a diagonal photon-number mixture and carries weights only.
    Weights always sum to one: any probability tail beyond the cutoff is
    discarded and the remainder renormalized.
    """

    __slots__ = ("kind", "cutoff", "coefficients", "weights", "tail_tol")

    def __init__(self, kind, cutoff, coefficients, weights, tail_tol):
        object.__setattr__(self, "kind", str(kind))
        object.__setattr__(self, "cutoff", int(cutoff))
        coeffs = None
        if coefficients is not None:
            coeffs = _frozen_array(coefficients, complex)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "weights", _frozen_array(weights, float))
        object.__setattr__(self, "tail_tol", float(tail_tol))
        if self.weights.size != self.cutoff + 1:
            raise ValueError("weights length inconsistent with cutoff")
        if abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise ValueError("pump weights must sum to 1 after renormalization")

    def __setattr__(self, name, value):
        raise AttributeError("PumpSpec is immutable")

    def __repr__(self) -> str:
        return f"PumpSpec(kind={self.kind!r}, cutoff={self.cutoff}, n_p={self.mean_photon:.6g})"

    # -- constructors -----------------------------------------------------
    @classmethod
    def coherent(cls, alpha: complex, cutoff: int | None = None,
                 tail_tol: float = DEFAULT_TAIL_TOL) -> "PumpSpec":
        alpha = complex(alpha)
        nbar = abs(alpha) ** 2
        if cutoff is None:
            cutoff = _poisson_cutoff(nbar, tail_tol)
        cutoff = int(cutoff)
        if cutoff < 0:
            raise ValueError("cutoff must be nonnegative")
        coeffs = np.empty(cutoff + 1, dtype=complex)
        coeffs[0] = math.exp(-nbar / 2.0)
        for m in range(cutoff):
            coeffs[m + 1] = coeffs[m] * alpha / math.sqrt(m + 1)
        return cls._from_pure("coherent", coeffs, tail_tol)

    @classmethod
    def thermal(cls, nbar: float, cutoff: int | None = None,
                tail_tol: float = DEFAULT_TAIL_TOL) -> "PumpSpec":
        nbar = float(nbar)
        if nbar < 0:
            raise ValueError("thermal occupation must be nonnegative")
        if cutoff is None:
            if nbar == 0.0:
                cutoff = 0
            else:
                q = nbar / (1.0 + nbar)
                # geometric tail beyond M is q^(M+1)
                cutoff = max(1, math.ceil(math.log(tail_tol) / math.log(q)) - 1)
                cutoff = min(cutoff, _MAX_AUTO_CUTOFF)
        cutoff = int(cutoff)
        m = np.arange(cutoff + 1)
        if nbar == 0.0:
            weights = np.zeros(cutoff + 1)
            weights[0] = 1.0
        else:
            weights = np.exp(m * math.log(nbar) - (m + 1) * math.log1p(nbar))
            weights /= weights.sum()
        return cls("thermal", cutoff, None, weights, tail_tol)

    @classmethod
    def fock(cls, m: int, cutoff: int | None = None) -> "PumpSpec":
        m = int(m)
        if m < 0:
            raise ValueError("fock occupation must be nonnegative")
        if cutoff is None:
            cutoff = m
        if m > cutoff:
            raise ValueError(f"fock({m}) does not fit below cutoff {cutoff}")
        coeffs = np.zeros(int(cutoff) + 1, dtype=complex)
        coeffs[m] = 1.0
        return cls._from_pure("fock", coeffs, 0.0)

    @classmethod
    def custom(cls, coefficients, tail_tol: float = DEFAULT_TAIL_TOL) -> "PumpSpec":
        coeffs = np.asarray(coefficients, dtype=complex).reshape(-1)
        if coeffs.size == 0:
            raise ValueError("custom pump needs at least one coefficient")
        return cls._from_pure("custom", coeffs, tail_tol)

    @classmethod
    def _from_pure(cls, kind, coeffs, tail_tol) -> "PumpSpec":
        norm = float(np.vdot(coeffs, coeffs).real)
        if norm <= 0.0:
            raise ValueError("pump coefficients have zero norm")
        coeffs = coeffs / math.sqrt(norm)
        return cls(kind, coeffs.size - 1, coeffs, np.abs(coeffs) ** 2, tail_tol)

    # -- queries -----------------------------------------------------------
    @property
    def is_pure(self) -> bool:
        return self.coefficients is not None

    @property
    def mean_photon(self) -> float:
        return float(np.dot(self.weights, np.arange(self.weights.size)))

    def density_matrix(self) -> DensityMatrix:
        mode = (TruncatedMode(self.cutoff),)
        if self.is_pure:
            rho = np.outer(self.coefficients, self.coefficients.conj())
        else:
            rho = np.diagflat(self.weights).astype(complex)
        return DensityMatrix(rho, mode)


def _poisson_cutoff(nbar: float, tail_tol: float) -> int:
    """Smallest M with Poisson(nbar) mass beyond M below tail_tol."""
    if nbar == 0.0:
        return 0
    term = math.exp(-nbar)
    cum = term
    m = 0
    while 1.0 - cum > tail_tol and m < _MAX_AUTO_CUTOFF:
        m += 1
        term *= nbar / m
        cum += term
    if 1.0 - cum > tail_tol:
        raise ValueError(f"no cutoff below {_MAX_AUTO_CUTOFF} reaches tail {tail_tol}")
    return m


def falling_factorial(m: int, k: int) -> float:
    """m (m-1) ... (m-k+1); zero when k > m."""
    if k > m:
        return 0.0
    out = 1.0
    for i in range(k):
        out *= m - i
    return out


def factorial_moment(pump: PumpSpec, k: int) -> float:
    """k-th factorial moment <a^\\dagger^k a^k> = sum_m w_m m!/(m-k)!."""
    if k < 1 or k != int(k):
        raise ValueError(f"moment order must be a positive integer, got {k!r}")
    k = int(k)
    m = np.arange(pump.weights.size, dtype=float)
    fall = np.ones_like(m)
    for i in range(k):
        fall *= np.clip(m - i, 0.0, None)
    return float(np.dot(pump.weights, fall))


def distribution_g2(probabilities: Sequence[float], floor: float = 1e-300) -> float:
    """g2(0) of a photon-number distribution (index = photon number)."""
    p = np.asarray(probabilities, dtype=float)
    nu = np.arange(p.size, dtype=float)
    mean = float(np.dot(nu, p))
    if mean <= floor:
        raise VacuumStatistics(f"mean photon number {mean!r} at or below floor {floor}")
    fac2 = float(np.dot(nu * (nu - 1.0), p))
    return fac2 / mean**2


def g2_zero(rho: DensityMatrix, floor: float = 1e-300) -> float:
    """Zero-delay second-order correlation of a single-mode density matrix."""
    if len(rho.modes) != 1:
        raise ValueError("g2_zero expects a single-mode density matrix")
    return distribution_g2(rho.diagonal(), floor=floor)
