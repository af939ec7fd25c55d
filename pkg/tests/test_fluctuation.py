import itertools

import numpy as np
import pytest

from tfqkd import load_fixture
from tfqkd.decoy_bounds import IntensityOrderError
from tfqkd.fluctuation import (
    FluctuationBox,
    FluctuationConfig,
    IntensityInterval,
    extremize_rate,
    grid_extremum,
)
from tfqkd.pipeline import evaluate_rates


@pytest.fixture(scope="module", params=["38dB", "46dB", "49dB", "55dB"])
def record(request):
    return load_fixture(request.param)


def mean_rate(rec):
    b = rec.intensities
    return sum(evaluate_rates(rec.gains, rec.x_stats, b.alpha2.center, b.triple()))


class TestBox:
    def test_overlapping_intervals_rejected(self):
        with pytest.raises(IntensityOrderError, match="intensity ordering"):
            FluctuationBox(
                IntensityInterval(0.02, 0.001),
                IntensityInterval(0.05, 0.01),
                IntensityInterval(0.045, 0.01),
                IntensityInterval(0.001),
            )

    def test_negative_half_width(self):
        with pytest.raises(ValueError):
            IntensityInterval(0.1, -0.01)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            FluctuationConfig(grid=1)
        with pytest.raises(ValueError):
            FluctuationConfig(mode="both")


class TestExtremize:
    def test_brackets_mean(self, record):
        r = mean_rate(record)
        lo = extremize_rate(record.gains, record.x_stats, record.intensities, "min")
        hi = extremize_rate(record.gains, record.x_stats, record.intensities, "max")
        assert lo.rate <= r <= hi.rate
        assert lo.rate == pytest.approx(lo.r10 + lo.r01, rel=1e-15)

    def test_per_detector_mode_is_at_least_as_extreme(self, record):
        joint = extremize_rate(record.gains, record.x_stats, record.intensities, "min")
        split = extremize_rate(
            record.gains, record.x_stats, record.intensities, "min", FluctuationConfig(mode="per_detector")
        )
        assert split.rate <= joint.rate * (1 + 1e-12)
        assert set(split.points) == {"d10", "d01"}

    def test_zero_width_box_is_the_mean(self, record):
        box = FluctuationBox.from_centers(*record.intensities.centers)
        res = extremize_rate(record.gains, record.x_stats, box, "max")
        assert res.rate == pytest.approx(mean_rate(record), rel=1e-14)

    def test_extremum_point_inside_box(self):
        rec = load_fixture("38dB")
        res = extremize_rate(rec.gains, rec.x_stats, rec.intensities, "min")
        b = rec.intensities
        for k, v in res.points["joint"].items():
            assert b.interval(k).low <= v <= b.interval(k).high


class TestGridExtremum:
    @staticmethod
    def bowl(x, y, z):
        return (x - 0.31) ** 2 + 2 * (y + 0.12) ** 2 + 0.5 * (z - 0.9) ** 2

    def test_refinement_never_worsens(self):
        lows, highs = (0, -1, 0), (1, 1, 2)
        prev = np.inf
        for passes in range(4):
            val, _ = grid_extremum(self.bowl, lows, highs, 5, "min", passes)
            assert val <= prev
            prev = val

    def test_axis_permutation_invariance(self):
        lows, highs = np.array([0.0, -1.0, 0.0]), np.array([1.0, 1.0, 2.0])
        ref, ref_pt = grid_extremum(self.bowl, lows, highs, 7, "min", 1)
        for perm in itertools.permutations(range(3)):
            inv = np.argsort(perm)

            def f(*args, perm=perm, inv=inv):
                return self.bowl(*(args[i] for i in inv))

            val, pt = grid_extremum(f, lows[list(perm)], highs[list(perm)], 7, "min", 1)
            assert val == ref
            assert tuple(pt[i] for i in inv) == ref_pt

    def test_max_sense_and_corner_optimum(self):
        val, pt = grid_extremum(lambda x, y: x + y, (0, 0), (1, 2), 3, "max", 2)
        assert val == 3 and pt == (1.0, 2.0)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            grid_extremum(lambda x: x, (0,), (1,), 3, "median")
        with pytest.raises(ValueError):
            grid_extremum(lambda x: x, (1,), (0,), 3)
