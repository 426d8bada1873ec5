"""Tests for series/weak-limit g2 predictions and the comparison report."""

import math

import numpy as np
import pytest

from pdc_lab.analytics import (
    SERIES_TRUST_LIMIT,
    Regime,
    compare,
    series_g2_multimode,
    series_g2_single,
    weak_g2_multimode,
    weak_g2_single,
)
from pdc_lab.errors import (
    NonPositiveParameter,
    SeriesDiverged,
    VacuumPump,
)
from pdc_lab.evolution import (
    coefficient_table,
    evolve_pump,
    series_state_amplitudes,
)
from pdc_lab.fock_core import PumpSpec
from pdc_lab.pdc_models import MULTI_MODE, PdcModel
from pdc_lab.photon_stats import g2_signal, g2_single, gk_pump


class TestWeakLimits:
    def test_pair_doubles_pump_statistics(self):
        assert weak_g2_multimode(2, 1.0) == 2.0
        assert weak_g2_multimode(2, 0.5) == 1.0
        assert weak_g2_multimode(3, 1.0) == 4.0
        assert weak_g2_multimode(4, 1.0) == 8.0

    def test_pair_rejects_negative_pump_g2(self):
        with pytest.raises(ValueError):
            weak_g2_multimode(2, -0.1)

    def test_single_mode_inverse_law(self):
        assert weak_g2_single(2, 2.0, 1e-2) == pytest.approx(1250.0, rel=1e-12)
        assert weak_g2_single(3, 1.0, 1e-2) == pytest.approx(10000 / 9, rel=1e-12)

    def test_single_mode_guards(self):
        with pytest.raises(VacuumPump):
            weak_g2_single(2, 0.0, 1e-2)
        with pytest.raises(NonPositiveParameter):
            weak_g2_single(2, 1.0, 0.0)


class TestSeriesG2:
    def test_pair_approaches_weak_limit(self):
        pump = PumpSpec.coherent(1.0)
        g = series_g2_multimode(2, pump, 1e-4)
        assert g == pytest.approx(2.0 * gk_pump(pump, 2), rel=1e-6)

    def test_triplet_approaches_weak_limit(self):
        pump = PumpSpec.thermal(0.8)
        g = series_g2_multimode(3, pump, 1e-4)
        assert g == pytest.approx(4.0 * gk_pump(pump, 2), rel=1e-5)

    def test_single_mode_matches_inverse_law(self):
        pump = PumpSpec.coherent(1.0)
        theta = 1e-3
        g = series_g2_single(2, pump, theta)
        assert g == pytest.approx(1.0 / (4 * theta**2), rel=1e-4)

    def test_vacuum_pump_raises(self):
        vacuum = PumpSpec.fock(0, cutoff=2)
        with pytest.raises(SeriesDiverged):
            series_g2_multimode(2, vacuum, 0.1)
        with pytest.raises(VacuumPump):
            series_g2_single(2, vacuum, 0.1)

    def test_g2_assembly_from_raw_expectations(self):
        # reassemble the pair-process prediction from the raw quadratic
        # expectations and check the packaged path lands on the same number
        table = coefficient_table(MULTI_MODE, 2)
        pump = PumpSpec.coherent(1.2)
        theta = 0.03
        series = series_state_amplitudes(table, pump, theta)
        k = np.arange(series.expectations.size)
        mean = float(k @ series.expectations)
        second = float((k * (k - 1)) @ series.expectations)
        by_hand = series.norm * second / mean**2
        assert series_g2_multimode(2, pump, theta) == pytest.approx(
            by_hand, rel=1e-12
        )


class TestSeriesVersusExact:
    def test_gap_shrinks_at_fourth_order_rate(self):
        # the fourth-order truncation leaves an O(theta^4) relative error in
        # g2, so halving theta shrinks the gap by ~16x
        pump = PumpSpec.fock(3)
        gaps = []
        for theta in (0.02, 0.01):
            model = PdcModel.multi_mode(2, theta)
            exact = g2_signal(evolve_pump(model, pump))
            series = series_g2_multimode(2, pump, theta)
            gaps.append(abs(series - exact) / exact)
        assert gaps[0] < 1e-5
        assert 14.0 < gaps[0] / gaps[1] < 18.0


class TestThresholdLaw:
    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize(
        "pump",
        [
            PumpSpec.coherent(1.0),
            PumpSpec.thermal(1.0),
            PumpSpec.fock(2),
            PumpSpec.fock(3),
        ],
        ids=["coherent", "thermal", "fock2", "fock3"],
    )
    def test_super_poissonian_iff_pump_exceeds_threshold(self, n, pump):
        # in the weak regime g2 = 2^{n-1} g2_pump, so the down-converted
        # light is super-Poissonian exactly when g2_pump > 2^{1-n}
        theta = math.sqrt(1e-6 / pump.mean_photon)
        g = g2_signal(evolve_pump(PdcModel.multi_mode(n, theta), pump))
        above = gk_pump(pump, 2) > 2.0 ** (1 - n) + 1e-3
        assert (g > 1.0) == above

    def test_pump_ordering_is_preserved(self):
        # sub-Poissonian < Poissonian < super-Poissonian pumps, in that order
        values = []
        for pump in (PumpSpec.fock(2), PumpSpec.coherent(1.0), PumpSpec.thermal(1.0)):
            theta = math.sqrt(1e-6 / pump.mean_photon)
            values.append(g2_signal(evolve_pump(PdcModel.multi_mode(2, theta), pump)))
        assert values[0] < values[1] < values[2]


class TestSingleModeScaling:
    def test_product_with_inverse_law_is_flat(self):
        pump = PumpSpec.coherent(1.0)
        theta = 1e-2
        g = g2_single(evolve_pump(PdcModel.single_mode(2, theta), pump))
        assert g * 4 * pump.mean_photon * theta**2 == pytest.approx(1.0, rel=5e-2)


class TestRegime:
    def test_strength(self):
        regime = Regime(theta=1e-3, n_p=4.0)
        assert regime.strength == pytest.approx(4e-6, rel=1e-15)
        assert SERIES_TRUST_LIMIT == 0.1


class TestCompare:
    def test_weak_pair_source_report(self):
        report = compare(PdcModel.multi_mode(2, 1e-3), PumpSpec.coherent(1.0))
        assert report.exact == pytest.approx(2.0, rel=5e-3)
        assert report.series == pytest.approx(report.exact, rel=1e-5)
        assert report.weak_limit == pytest.approx(2.0, rel=1e-8)
        assert report.series_trusted
        assert not report.degenerate

    def test_gaps_recomputable(self):
        report = compare(PdcModel.multi_mode(2, 0.05), PumpSpec.coherent(1.0))
        weak_gap = abs(report.weak_limit - report.exact) / abs(report.exact)
        series_gap = abs(report.series - report.exact) / abs(report.exact)
        assert report.relative_gaps.weak == pytest.approx(weak_gap, abs=1e-15)
        assert report.relative_gaps.series == pytest.approx(series_gap, abs=1e-15)

    def test_degenerate_when_both_sides_vanish(self):
        # a single pump photon gives g2 = 0 exactly and the weak limit is
        # also 0; the gap is reported as 0 rather than 0/0
        report = compare(PdcModel.multi_mode(2, 0.3), PumpSpec.fock(1))
        assert report.exact == 0.0
        assert report.weak_limit == 0.0
        assert report.relative_gaps.weak == 0.0
        assert report.degenerate

    def test_single_mode_report(self):
        report = compare(PdcModel.single_mode(2, 5e-3), PumpSpec.coherent(2.0))
        assert report.weak_limit == pytest.approx(2500.0, rel=1e-8)
        assert report.relative_gaps.weak < 0.05

    def test_untrusted_outside_weak_regime(self):
        report = compare(PdcModel.multi_mode(2, 0.2), PumpSpec.coherent(3.0))
        assert report.regime.strength > SERIES_TRUST_LIMIT
        assert not report.series_trusted
        assert report.series is not None

    def test_series_none_when_order_keeps_no_conversion(self):
        # with order=0 the series keeps only the identity, the predicted mean
        # vanishes, and the report records the series as unavailable
        report = compare(
            PdcModel.multi_mode(2, 1e-3), PumpSpec.coherent(1.0), order=0
        )
        assert report.series is None
        assert report.relative_gaps.series is None
        assert not report.series_trusted
        assert report.exact == pytest.approx(2.0, rel=5e-3)

    def test_theta_override(self):
        model = PdcModel.multi_mode(2, 0.5)
        report = compare(model, PumpSpec.coherent(1.0), theta=1e-3)
        assert report.regime.theta == 1e-3
        assert report.exact == pytest.approx(2.0, rel=5e-3)

    def test_regime_uses_pump_mean(self):
        pump = PumpSpec.coherent(2.0)
        report = compare(PdcModel.multi_mode(2, 1e-3), pump)
        assert report.regime.n_p == pytest.approx(4.0, rel=1e-10)
