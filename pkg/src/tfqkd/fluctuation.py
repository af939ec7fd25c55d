"""Worst- and best-case key rate over intensity uncertainty intervals.

The measured X- and Z-basis statistics are held fixed; only the intensity
values fed to the bounds and to the phase-error formula move inside their
intervals.  Alice and Bob share one interval per intensity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from .decoy_bounds import GainsTable, IntensityOrderError, IntensityTriple, Outcome
from .key_rate import ProtocolParams, XBasisStats
from .pipeline import evaluate_outcome

__all__ = [
    "BOX_AXES",
    "IntensityInterval",
    "FluctuationBox",
    "FluctuationConfig",
    "FluctuationResult",
    "grid_extremum",
    "extremize_rate",
]

BOX_AXES = ("alpha2", "mu", "nu", "omega")
MODES = ("joint", "per_detector")


@dataclass(frozen=True)
class IntensityInterval:
    center: float
    half_width: float = 0.0

    def __post_init__(self):
        if not self.half_width >= 0:
            raise ValueError(f"half_width must be >= 0, got {self.half_width}")

    @property
    def low(self) -> float:
        return self.center - self.half_width

    @property
    def high(self) -> float:
        return self.center + self.half_width


@dataclass(frozen=True)
class FluctuationBox:
    """Uncertainty intervals for the signal and the three decoy intensities."""

    alpha2: IntensityInterval
    mu: IntensityInterval
    nu: IntensityInterval
    omega: IntensityInterval

    def __post_init__(self):
        for name in ("alpha2", "mu", "nu"):
            if not getattr(self, name).low > 0:
                raise IntensityOrderError(f"intensity ordering: {name} interval must stay above 0")
        if not self.omega.low >= 0:
            raise IntensityOrderError("intensity ordering: omega interval must stay >= 0")
        if not (self.mu.low > self.nu.high and self.nu.low > self.omega.high):
            raise IntensityOrderError(
                "intensity ordering: intervals overlap, mu > nu > omega fails at some corner"
            )

    @classmethod
    def from_centers(cls, alpha2, mu, nu, omega) -> "FluctuationBox":
        """Zero-width box."""
        return cls(*(IntensityInterval(float(v)) for v in (alpha2, mu, nu, omega)))

    def interval(self, name: str) -> IntensityInterval:
        return getattr(self, name)

    @property
    def lows(self):
        return tuple(self.interval(k).low for k in BOX_AXES)

    @property
    def highs(self):
        return tuple(self.interval(k).high for k in BOX_AXES)

    @property
    def centers(self):
        return tuple(self.interval(k).center for k in BOX_AXES)

    def triple(self) -> IntensityTriple:
        return IntensityTriple(self.mu.center, self.nu.center, self.omega.center)


@dataclass(frozen=True)
class FluctuationConfig:
    """Search settings: points per axis, refinement passes, and reduction mode.

    ``mode="joint"`` extremizes ``R10 + R01`` at a single intensity setting;
    ``mode="per_detector"`` extremizes each outcome on its own and sums.
    """

    grid: int = 7
    refine_passes: int = 1
    mode: str = "joint"
    params: ProtocolParams = field(default_factory=ProtocolParams)
    selection: str = "positive"

    def __post_init__(self):
        if self.grid < 2:
            raise ValueError("grid needs at least 2 points per axis")
        if self.refine_passes < 0:
            raise ValueError("refine_passes must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class FluctuationResult:
    rate: float
    r10: float
    r01: float
    # argument of the extremum; per_detector mode keeps one point per outcome
    points: Dict[str, Dict[str, float]]


def _axis(lo, hi, n):
    return np.array([lo]) if hi == lo else np.linspace(lo, hi, n)


def _best(values: np.ndarray, sense: str) -> int:
    return int(np.argmin(values) if sense == "min" else np.argmax(values))


def _better(a, b, sense):
    return a < b if sense == "min" else a > b


def grid_extremum(
    f: Callable[..., np.ndarray],
    lows: Sequence[float],
    highs: Sequence[float],
    points: int = 7,
    sense: str = "min",
    refine_passes: int = 1,
) -> Tuple[float, Tuple[float, ...]]:
    """Exhaustive tensor-grid search for the extremum of ``f`` over a box.

    ``f`` is called with one flat array per axis and must return an array of
    objective values.  After the coarse grid, each refinement pass searches a
    grid of the same size at half the previous step, centred on the
    incumbent and clipped to the box; the incumbent is only replaced by a
    strictly better point.
    """
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    lows = np.asarray(lows, dtype=float)
    highs = np.asarray(highs, dtype=float)
    if np.any(highs < lows):
        raise ValueError("box has an upper edge below its lower edge")

    def search(axes):
        mesh = [m.ravel() for m in np.meshgrid(*axes, indexing="ij")]
        vals = np.asarray(f(*mesh), dtype=float)
        k = _best(vals, sense)
        return float(vals[k]), tuple(float(m[k]) for m in mesh)

    best_val, best_pt = search([_axis(lo, hi, points) for lo, hi in zip(lows, highs)])
    step = (highs - lows) / (points - 1)
    half = (points - 1) // 2
    for _ in range(refine_passes):
        step = step / 2
        axes = []
        for x, h, lo, hi in zip(best_pt, step, lows, highs):
            ax = np.unique(np.clip(x + h * np.arange(-half, half + 1), lo, hi))
            axes.append(ax)
        val, pt = search(axes)
        if _better(val, best_val, sense):
            best_val, best_pt = val, pt
    return best_val, best_pt


def _objective(gains, x_stats, cfg, outcomes):
    def f(alpha2, mu, nu, omega):
        s = IntensityTriple(mu, nu, omega)
        total = 0.0
        for o in outcomes:
            total = total + evaluate_outcome(gains, x_stats, alpha2, s, o, cfg.params, cfg.selection).rate
        return total

    return f


def _as_point(pt) -> Dict[str, float]:
    return dict(zip(BOX_AXES, pt))


def extremize_rate(
    gains: GainsTable,
    x_stats: XBasisStats,
    box: FluctuationBox,
    sense: str = "min",
    cfg: FluctuationConfig = FluctuationConfig(),
) -> FluctuationResult:
    """Smallest (``sense="min"``) or largest key rate over the box."""
    search = lambda outcomes: grid_extremum(  # noqa: E731
        _objective(gains, x_stats, cfg, outcomes), box.lows, box.highs, cfg.grid, sense, cfg.refine_passes
    )
    if cfg.mode == "joint":
        _, pt = search(tuple(Outcome))
        r10, r01 = (_objective(gains, x_stats, cfg, (o,))(*pt) for o in Outcome)
        r10, r01 = float(r10), float(r01)
        return FluctuationResult(r10 + r01, r10, r01, {"joint": _as_point(pt)})
    r10, pt10 = search((Outcome.D10,))
    r01, pt01 = search((Outcome.D01,))
    return FluctuationResult(r10 + r01, r10, r01, {"d10": _as_point(pt10), "d01": _as_point(pt01)})
