"""Closed-form g2 predictions and exact-vs-predicted comparison reports.

Two prediction tiers per process: the fourth-order series (normalization
carried explicitly, valid while the expansion converges) and the weak
down-conversion limit (leading order in n_p theta^2).  ``compare`` runs the
exact pipeline next to both and reports relative gaps plus the regime.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NegativeNorm, NonPositiveParameter, SeriesDiverged, VacuumPump
from .evolution import coefficient_table, evolve_pump, series_state_amplitudes
from .fock_core import PumpSpec
from .pdc_models import MULTI_MODE, SINGLE_MODE, PdcModel
from .photon_stats import g2_signal, g2_single, gk_pump

# Beyond this pump-depletion scale the theta^4 expansion is not trusted.
SERIES_TRUST_LIMIT = 0.1


@dataclass(frozen=True)
class Regime:
    """Where a configuration sits on the weak-to-strong conversion axis."""

    theta: float
    n_p: float

    @property
    def strength(self) -> float:
        return self.n_p * self.theta**2


@dataclass(frozen=True)
class RelativeGaps:
    """Relative deviations of the predictions from the exact value."""

    series: float | None
    weak: float


@dataclass(frozen=True)
class G2Report:
    """Exact g2 next to the series and weak-limit predictions."""

    exact: float
    series: float | None
    weak_limit: float
    relative_gaps: RelativeGaps
    regime: Regime
    series_trusted: bool
    degenerate: bool


def _series_expectations(process: str, n: int, pump: PumpSpec, theta: float,
                         order: int):
    table = coefficient_table(process, n, order)
    return series_state_amplitudes(table, pump, theta)


def series_g2_multimode(n: int, pump: PumpSpec, theta: float, order: int = 4) -> float:
    """Fourth-order series prediction for one multi-mode output's g2."""
    se = _series_expectations(MULTI_MODE, n, pump, float(theta), order)
    k = np.arange(se.expectations.size, dtype=float)
    numerator = float(np.dot(k * (k - 1.0), se.expectations))
    mean = float(np.dot(k, se.expectations))
    if mean <= 0.0:
        raise SeriesDiverged(
            f"series mean photon number {mean!r} is not positive at theta={theta}"
        )
    return se.norm * numerator / mean**2


def weak_g2_multimode(n: int, pump_g2: float) -> float:
    """Weak-limit law: each output mode inherits 2^(n-1) times the pump g2."""
    pump_g2 = float(pump_g2)
    if pump_g2 < 0.0:
        raise ValueError(f"pump g2 must be >= 0, got {pump_g2}")
    return 2.0 ** (n - 1) * pump_g2


def series_g2_single(n: int, pump: PumpSpec, theta: float, order: int = 4) -> float:
    """Fourth-order series prediction for the single down-converted mode's g2."""
    if pump.mean_photon <= 0.0:
        raise VacuumPump("series prediction needs a nonvacuum pump")
    se = _series_expectations(SINGLE_MODE, n, pump, float(theta), order)
    nk = n * np.arange(se.expectations.size, dtype=float)
    numerator = float(np.dot(nk * (nk - 1.0), se.expectations))
    mean = float(np.dot(nk, se.expectations))
    if mean <= 0.0:
        raise SeriesDiverged(
            f"series mean photon number {mean!r} is not positive at theta={theta}"
        )
    return se.norm * numerator / mean**2


def weak_g2_single(n: int, n_p: float, theta: float) -> float:
    """Weak-limit law (n-1)/(n! n n_p theta^2) for the single-mode process."""
    n_p = float(n_p)
    theta = float(theta)
    if n_p <= 0.0:
        raise VacuumPump(f"weak single-mode law needs n_p > 0, got {n_p}")
    if theta <= 0.0:
        raise NonPositiveParameter(f"weak single-mode law needs theta > 0, got {theta}")
    return (n - 1) / (math.factorial(n) * n * n_p * theta**2)


def _relative_gap(predicted: float, exact: float) -> tuple[float, bool]:
    """Gap |predicted - exact| / |exact|; 0/0 reported as 0 and degenerate."""
    if exact == 0.0 and predicted == 0.0:
        return 0.0, True
    if exact == 0.0:
        return math.inf, False
    return abs(predicted - exact) / abs(exact), False


def compare(model: PdcModel, pump: PumpSpec, theta: float | None = None,
            order: int = 4) -> G2Report:
    """Exact pipeline, series formula and weak limit for one configuration.

    The series entry is None when the expansion breaks down at this theta
    (non-positive normalization or mean); the weak limit always evaluates.
    """
    theta = model.theta if theta is None else float(theta)
    state = evolve_pump(model, pump, theta)
    if model.process == MULTI_MODE:
        exact = g2_signal(state)
        weak = weak_g2_multimode(model.n, gk_pump(pump, 2))
        series_fn = series_g2_multimode
    else:
        exact = g2_single(state)
        weak = weak_g2_single(model.n, pump.mean_photon, theta)
        series_fn = series_g2_single
    try:
        series = series_fn(model.n, pump, theta, order)
    except (SeriesDiverged, NegativeNorm):
        series = None
    regime = Regime(theta, pump.mean_photon)
    series_gap: float | None = None
    degenerate = False
    if series is not None:
        series_gap, degenerate_s = _relative_gap(series, exact)
        degenerate = degenerate or degenerate_s
    weak_gap, degenerate_w = _relative_gap(weak, exact)
    degenerate = degenerate or degenerate_w
    trusted = series is not None and regime.strength <= SERIES_TRUST_LIMIT
    return G2Report(
        exact=exact,
        series=series,
        weak_limit=weak,
        relative_gaps=RelativeGaps(series_gap, weak_gap),
        regime=regime,
        series_trusted=trusted,
        degenerate=degenerate,
    )
