import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import mp_coeff, mp_residuals
from tfqkd import load_fixture
from tfqkd.decoy_bounds import Outcome, YieldBounds
from tfqkd.key_rate import (
    ProtocolParams,
    XBasisStats,
    binary_entropy,
    click_probability,
    coherent_coeffs,
    phase_error_upper,
    qber,
    rate_per_detector,
    residuals,
    total_rate,
)


def stats_from(fill):
    return XBasisStats(np.full((2, 2, 2), fill, dtype=float))


class TestClickAndQber:
    def test_38db_published_cells(self):
        x = load_fixture("38dB").x_stats
        assert click_probability(x, "d10") == pytest.approx(3.1823e-04, rel=1e-4)
        assert qber(x, "d10") == pytest.approx(3.2080e-03, rel=1e-4)
        hand = (2.1371e-06 + 1.9464e-06) / (4 * click_probability(x, "d10"))
        assert qber(x, "d10") == pytest.approx(hand, rel=1e-14)

    def test_trivial_stats(self):
        assert click_probability(stats_from(0.0), "d10") == 0.0
        assert click_probability(stats_from(0.5), "d01") == 0.5
        with pytest.raises(ValueError, match="undefined QBER"):
            qber(stats_from(0.0), "d10")

    @pytest.mark.parametrize("o", list(Outcome))
    def test_qber_extremes(self, o):
        v = np.zeros((2, 2, 2))
        # D10 errors are the anti-correlated bit pairs, D01 errors the correlated ones
        err = [(0, 1), (1, 0)] if o is Outcome.D10 else [(0, 0), (1, 1)]
        ok = [(0, 0), (1, 1)] if o is Outcome.D10 else [(0, 1), (1, 0)]
        for bA, bB in ok:
            v[bA, bB, o.index] = 0.3
        assert qber(XBasisStats(v), o) == 0.0
        v[:] = 0
        for bA, bB in err:
            v[bA, bB, o.index] = 0.3
        assert qber(XBasisStats(v), o) == 1.0

    @settings(max_examples=50)
    @given(st.lists(st.floats(0, 0.5), min_size=8, max_size=8), st.floats(0, 1))
    def test_click_probability_linear_and_bounded(self, vals, k):
        x = XBasisStats(np.array(vals).reshape(2, 2, 2))
        for o in Outcome:
            p = click_probability(x, o)
            assert p <= max(vals) + 1e-15
            scaled = click_probability(XBasisStats(k * x.values), o)
            assert scaled == pytest.approx(k * p, rel=1e-12, abs=1e-300)
            if p > 0:
                assert 0.0 <= qber(x, o) <= 1.0

    def test_stats_mapping_round_trip(self):
        x = load_fixture("46dB").x_stats
        assert XBasisStats.from_mapping(x.to_mapping()) == x


class TestCoefficients:
    def test_vacuum(self):
        assert coherent_coeffs(0.0, 0) == 1.0
        assert np.all(coherent_coeffs(0.0, np.arange(1, 10)) == 0.0)

    @pytest.mark.parametrize("alpha2", [1e-4, 0.0256, 0.3, 1.0])
    def test_normalization(self, alpha2):
        c = coherent_coeffs(alpha2, np.arange(61))
        assert 1 - 1e-12 <= np.sum(c**2) <= 1 + 1e-15

    @pytest.mark.parametrize("n", [0, 1, 2, 5, 17])
    def test_against_arbitrary_precision(self, n):
        assert coherent_coeffs(0.0256, n) == pytest.approx(float(mp_coeff(0.0256, n)), rel=1e-13)
        assert coherent_coeffs(0.0256, 0) == pytest.approx(math.exp(-0.0128), rel=1e-15)


class TestResiduals:
    def test_vacuum(self):
        assert residuals(0.0) == (0.0, 0.0)

    @pytest.mark.parametrize("alpha2", [0.0175, 0.0256, 0.1, 0.5])
    def test_against_arbitrary_precision(self, alpha2):
        d, db = residuals(alpha2)
        rd, rdb = mp_residuals(alpha2)
        assert d == pytest.approx(float(rd), rel=1e-12)
        assert db == pytest.approx(float(rdb), rel=1e-12)

    def test_small_and_non_negative_at_working_point(self):
        d, db = residuals(0.0256)
        assert 0 <= d < 1e-3 and 0 <= db < 1e-3

    @pytest.mark.parametrize("alpha2", [0.0256, 0.3, 1.0])
    def test_cutoff_convergence(self, alpha2):
        a = np.array(residuals(alpha2, cutoff=40))
        b = np.array(residuals(alpha2, cutoff=60))
        assert np.all(np.abs(a - b) < 1e-15)

    def test_array_input(self):
        a2 = np.array([0.01, 0.0256])
        d, db = residuals(a2)
        assert d[1] == pytest.approx(residuals(0.0256)[0], rel=1e-14)
        assert db[0] == pytest.approx(residuals(0.01)[1], rel=1e-14)

    def test_cutoff_too_small(self):
        with pytest.raises(ValueError):
            residuals(0.1, cutoff=5)


class TestPhaseError:
    def test_38db_d10_published_yields(self):
        y = YieldBounds(5.8083e-07, 8.6573e-03, 1.9756e-02, 1.3268e-02)
        assert phase_error_upper(y, 0.0256, 3.1823e-04) == pytest.approx(1.3273e-01, rel=1e-3)

    def test_55db_d01_published_yields(self):
        y = YieldBounds(5.0726e-07, 1.2045e-03, 1.3736e-03, 3.8711e-03)
        assert phase_error_upper(y, 0.0175, 3.1287e-05) == pytest.approx(1.7501e-01, rel=1e-3)

    def test_zero_yields_leave_residuals(self):
        d, db = residuals(0.0256)
        p = 1e-3
        assert phase_error_upper(YieldBounds(0, 0, 0, 0), 0.0256, p) == pytest.approx((d**2 + db**2) / p, rel=1e-14)
        assert phase_error_upper(YieldBounds(1, 1, 1, 1), 0.0256, 1e-9) == 1.0

    def test_zero_click_probability(self):
        with pytest.raises(ValueError):
            phase_error_upper(YieldBounds(0, 0, 0, 0), 0.0256, 0.0)


class TestEntropyAndRate:
    def test_entropy_points(self):
        assert binary_entropy(0.5) == 1.0
        assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
        with pytest.raises(ValueError):
            binary_entropy(1.2)

    @given(st.floats(0, 1))
    def test_entropy_symmetry(self, x):
        assert binary_entropy(x) == pytest.approx(binary_entropy(1 - x), abs=1e-12)

    def test_published_rates(self):
        assert rate_per_detector(3.1823e-04, 3.2080e-03, 1.3273e-01) == pytest.approx(1.2695e-04, rel=1e-3)
        assert rate_per_detector(6.2834e-05, 5.6327e-03, 1.7243e-01) == pytest.approx(1.7502e-05, rel=1e-3)
        assert total_rate(1.2695e-04, 1.3789e-04) == pytest.approx(2.6484e-04, rel=1e-4)
        assert total_rate(1.0305e-05, 7.2368e-06) == pytest.approx(1.7542e-05, rel=1e-4)
        assert total_rate(0.0, 0.0) == 0.0

    def test_rate_clamps_at_zero(self):
        assert rate_per_detector(1e-4, 0.01, 0.5) == 0.0
        with pytest.raises(ValueError):
            total_rate(-1e-6, 1e-6)

    @settings(max_examples=100)
    @given(st.floats(0, 0.5), st.floats(0, 0.5), st.floats(0, 0.49), st.floats(0, 0.49))
    def test_rate_monotone_in_errors(self, e1, e2, ph1, ph2):
        p = 1e-4
        lo_e, hi_e = sorted((e1, e2))
        lo_ph, hi_ph = sorted((ph1, ph2))
        assert rate_per_detector(p, hi_e, lo_ph) <= rate_per_detector(p, lo_e, lo_ph)
        assert rate_per_detector(p, lo_e, hi_ph) <= rate_per_detector(p, lo_e, lo_ph)
        assert rate_per_detector(p, hi_e, hi_ph) >= 0.0

    def test_params_validation(self):
        with pytest.raises(ValueError):
            ProtocolParams(f_ec=0.9)
        with pytest.raises(ValueError):
            ProtocolParams(series_cutoff=5)
        assert ProtocolParams().f_ec == 1.16


def test_mpmath_oracle_is_independent():
    # sanity check of the oracle itself: sum of all c_n^2 is 1
    with mpmath.workdps(40):
        total = sum(mp_coeff(0.3, n, 40) ** 2 for n in range(80))
        assert abs(total - 1) < mpmath.mpf(10) ** -35
