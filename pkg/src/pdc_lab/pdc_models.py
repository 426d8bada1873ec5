"""PDC process descriptions, Hamiltonian builders and the physical coupling.

Two process families, each at integer order n >= 2:

* ``multi_mode``: one pump photon converts into one photon in each of n
  distinct down-converted modes, H_I = eta (a_p prod_j a_j^dag + h.c.).
* ``single_mode``: one pump photon converts into n photons of a single
  down-converted mode, H_I = eta (a_p a_d^dag^n + h.c.).

All dynamics are parameterized by the dimensionless theta = eta*t; Hamiltonians
are built in units of eta, and optional free terms use frequencies expressed in
the same units.  Physical eta and t enter only through ``coupling_eta`` and
``interaction_strength``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, NonPositiveParameter
from .fock_core import TruncatedMode, ladder, number_operator, tensor
from .kvconfig import load_kv

# CODATA values, SI units.
HBAR = 1.054571817e-34
C_LIGHT = 2.99792458e8
EPSILON_0 = 8.8541878128e-12

MULTI_MODE = "multi_mode"
SINGLE_MODE = "single_mode"
PROCESSES = (MULTI_MODE, SINGLE_MODE)

FREQUENCY_SUM_RULE_RTOL = 1e-9

DEFAULT_PARAMS_RESOURCE = "data/bibo_404nm.cfg"


@dataclass(frozen=True)
class Frequencies:
    """Optional mode frequencies: pump and one entry per down-converted mode.

    Values are interpreted as multiples of eta wherever they enter a
    Hamiltonian, matching the dimensionless-theta convention.
    """

    omega_p: float
    omega_down: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega_p", float(self.omega_p))
        object.__setattr__(self, "omega_down", tuple(float(w) for w in self.omega_down))


@dataclass(frozen=True)
class PdcModel:
    """One PDC process: kind, order n, interaction strength theta."""

    process: str
    n: int
    theta: float
    frequencies: Frequencies | None = None

    def __post_init__(self) -> None:
        if self.process not in PROCESSES:
            raise ValueError(f"process must be one of {PROCESSES}, got {self.process!r}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"order n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        theta = float(self.theta)
        if theta < 0.0 or not math.isfinite(theta):
            raise ValueError(f"theta must be finite and >= 0, got {self.theta!r}")
        object.__setattr__(self, "theta", theta)
        if self.frequencies is not None:
            self._check_frequencies()

    def _check_frequencies(self) -> None:
        f = self.frequencies
        if len(f.omega_down) != self.n_down_modes:
            raise ValueError(
                f"{self.process}(n={self.n}) needs {self.n_down_modes} down-converted "
                f"frequencies, got {len(f.omega_down)}"
            )
        if self.process == MULTI_MODE:
            total = sum(f.omega_down)
        else:
            total = self.n * f.omega_down[0]
        scale = max(abs(f.omega_p), abs(total))
        if scale > 0 and abs(f.omega_p - total) > FREQUENCY_SUM_RULE_RTOL * scale:
            raise ValueError(
                f"frequency sum rule violated: omega_p = {f.omega_p!r} vs "
                f"down-conversion total {total!r}"
            )

    @classmethod
    def multi_mode(cls, n: int, theta: float,
                   frequencies: Frequencies | None = None) -> "PdcModel":
        return cls(MULTI_MODE, n, theta, frequencies)

    @classmethod
    def single_mode(cls, n: int, theta: float,
                    frequencies: Frequencies | None = None) -> "PdcModel":
        return cls(SINGLE_MODE, n, theta, frequencies)

    @property
    def n_down_modes(self) -> int:
        return self.n if self.process == MULTI_MODE else 1

    @property
    def photons_per_event(self) -> int:
        """Down-converted photons created per absorbed pump photon."""
        return self.n

    def with_theta(self, theta: float) -> "PdcModel":
        return PdcModel(self.process, self.n, theta, self.frequencies)


def reachable_cutoffs(model: PdcModel, pump_cutoff: int) -> tuple[TruncatedMode, ...]:
    """Smallest mode layout (pump first) closed under the interaction.

    A pump truncated at M photons can convert at most M times, filling each
    multi-mode output to M photons or the single output to n*M photons.
    """
    m = int(pump_cutoff)
    if m < 0:
        raise ValueError("pump cutoff must be nonnegative")
    pump = TruncatedMode(m)
    if model.process == MULTI_MODE:
        return (pump,) + tuple(TruncatedMode(m) for _ in range(model.n))
    return (pump, TruncatedMode(model.n * m))


def _as_modes(model: PdcModel, cutoffs) -> tuple[TruncatedMode, ...]:
    modes = tuple(
        c if isinstance(c, TruncatedMode) else TruncatedMode(int(c)) for c in cutoffs
    )
    expected = 1 + model.n_down_modes
    if len(modes) != expected:
        raise ValueError(
            f"{model.process}(n={model.n}) needs {expected} modes (pump first), "
            f"got {len(modes)}"
        )
    return modes


def _embed(op: np.ndarray, modes: Sequence[TruncatedMode], at: int) -> np.ndarray:
    factors = [np.eye(m.dim, dtype=complex) for m in modes]
    factors[at] = op
    return tensor(factors)


def build_full_hamiltonian(model: PdcModel, cutoffs,
                           include_free_terms: bool = False) -> np.ndarray:
    """Dense joint-space Hamiltonian in units of eta (pump mode first).

    The interaction term is a_p prod_j a_j^dag (multi-mode) or a_p a_d^dag^n
    (single-mode) plus Hermitian conjugate.  When flagged, free terms
    omega * a^dag a are added per mode using the model frequencies (treated
    as multiples of eta).
    """
    modes = _as_modes(model, cutoffs)
    factors = [ladder(modes[0], "lower")]
    if model.process == MULTI_MODE:
        factors.extend(ladder(m, "raise") for m in modes[1:])
    else:
        factors.append(np.linalg.matrix_power(ladder(modes[1], "raise"), model.n))
    term = tensor(factors)
    h = term + term.conj().T
    if include_free_terms:
        if model.frequencies is None:
            raise ValueError("include_free_terms requires model frequencies")
        omegas = (model.frequencies.omega_p,) + model.frequencies.omega_down
        for at, omega in enumerate(omegas):
            h += omega * _embed(number_operator(modes[at]), modes, at)
    return h


@dataclass(frozen=True)
class BlockHamiltonian:
    """Tridiagonal restriction of H_I/eta to the block seeded by |m, 0, ...>.

    Basis state k of the block is |m-k, k, ..., k> (multi-mode) or
    |m-k, n*k> (single-mode), k = 0..m.  The diagonal vanishes in the
    interaction picture; couplings sit on the first off-diagonal.
    """

    m: int
    diag: np.ndarray
    offdiag: np.ndarray


def build_block_hamiltonian(model: PdcModel, m: int) -> BlockHamiltonian:
    """Block Hamiltonian for initial pump Fock number m, in units of eta.

    offdiag[k] couples |m-k, k, ...> to |m-k-1, k+1, ...>:
    sqrt((m-k)(k+1)^n) for multi-mode, sqrt((m-k)(nk+n)!/(nk)!) for
    single-mode.  Couplings are evaluated in log space so large factorial
    ratios only fail if the coupling itself exceeds the float range.
    """
    m = int(m)
    if m < 0:
        raise ValueError("initial pump photon number must be nonnegative")
    n = model.n
    off = np.empty(m, dtype=float)
    for k in range(m):
        if model.process == MULTI_MODE:
            log_sq = math.log(m - k) + n * math.log(k + 1)
        else:
            log_sq = math.log(m - k) + math.lgamma(n * k + n + 1) - math.lgamma(n * k + 1)
        half = 0.5 * log_sq
        if half > 709.0:  # log of float max
            raise OverflowError(
                f"block coupling exp({half:.1f}) overflows at m={m}, k={k}"
            )
        off[k] = math.exp(half)
    return BlockHamiltonian(m, np.zeros(m + 1), off)


@dataclass(frozen=True)
class CouplingParams:
    """Physical inputs of the coupling-constant formula, SI units throughout.

    chi_eff: effective second-order nonlinearity as used by the formula
    (see the default parameter file for its calibration); sigma_p: pump
    beam waist (m); sigma_1: detection-mode diameter (m); mu_p, mu_s, mu_i:
    refractive indices; L: crystal length (m); lambda_p: pump wavelength (m);
    pump_power: W.
    """

    chi_eff: float
    sigma_p: float
    sigma_1: float
    mu_p: float
    mu_s: float
    mu_i: float
    L: float
    lambda_p: float
    pump_power: float

    def __post_init__(self) -> None:
        for name in PHYSICAL_KEYS:
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise NonPositiveParameter(f"{name} must be positive, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_mapping(cls, mapping: dict, source: str = "<mapping>") -> "CouplingParams":
        """Build from a string mapping; unrelated keys are ignored."""
        values = {}
        for name in PHYSICAL_KEYS:
            if name not in mapping:
                raise ConfigError(f"{source}: missing physical parameter {name!r}")
            raw = mapping[name]
            try:
                values[name] = float(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{source}: cannot parse {name} = {raw!r}") from exc
        return cls(**values)

    @classmethod
    def from_file(cls, path: str) -> "CouplingParams":
        return cls.from_mapping(load_kv(path), source=path)

    @classmethod
    def default(cls) -> "CouplingParams":
        from importlib.resources import files

        text = files(__package__).joinpath(DEFAULT_PARAMS_RESOURCE).read_text("utf-8")
        from .kvconfig import parse_kv

        return cls.from_mapping(parse_kv(text, DEFAULT_PARAMS_RESOURCE),
                                source=DEFAULT_PARAMS_RESOURCE)


PHYSICAL_KEYS = (
    "chi_eff", "sigma_p", "sigma_1", "mu_p", "mu_s", "mu_i",
    "L", "lambda_p", "pump_power",
)


def coupling_eta(params: CouplingParams) -> float:
    """Down-conversion coupling constant eta in 1/s.

    eta = sigma_p^2/(sigma_1^2 + 2 sigma_p^2)
          * sqrt(16 hbar pi^3 c^3 chi_eff
                 / (eps0 mu_s^2 mu_i^2 mu_p^2 L lambda_p^3 sigma_p^2))

    chi_eff enters unsquared, so its numeric value carries the unit
    bookkeeping; the shipped default file documents the calibration.
    """
    p = params
    prefactor = p.sigma_p**2 / (p.sigma_1**2 + 2.0 * p.sigma_p**2)
    radicand = (16.0 * HBAR * math.pi**3 * C_LIGHT**3 * p.chi_eff) / (
        EPSILON_0 * p.mu_s**2 * p.mu_i**2 * p.mu_p**2
        * p.L * p.lambda_p**3 * p.sigma_p**2
    )
    return prefactor * math.sqrt(radicand)


@dataclass(frozen=True)
class InteractionStrength:
    """Derived regime numbers: coupling, pump photons per transit, transit time."""

    eta: float
    n_p: float
    t: float
    strength: float

    @property
    def theta(self) -> float:
        return self.eta * self.t


def interaction_strength(params: CouplingParams) -> InteractionStrength:
    """Regime record {eta, n_p, t, strength = n_p eta^2 t^2}.

    n_p counts pump photons inside the crystal during one transit,
    (P/hbar omega_p) * (L mu_p / c); t is the transit time L mu_p / c.
    """
    eta = coupling_eta(params)
    omega_p = 2.0 * math.pi * C_LIGHT / params.lambda_p
    t = params.L * params.mu_p / C_LIGHT
    n_p = (params.pump_power / (HBAR * omega_p)) * t
    return InteractionStrength(eta, n_p, t, n_p * (eta * t) ** 2)
