"""Chain the decoy bounds and the key-rate formula for one data set."""

from __future__ import annotations

from dataclasses import dataclass

from .decoy_bounds import GainsTable, IntensityTriple, Outcome, YieldBounds, yield_bounds
from .key_rate import (
    ProtocolParams,
    XBasisStats,
    click_probability,
    phase_error_upper,
    qber,
    rate_per_detector,
)

__all__ = ["DetectorResult", "evaluate_outcome", "evaluate_rates"]


@dataclass(frozen=True)
class DetectorResult:
    """Everything computed for one exclusive-click outcome."""

    outcome: Outcome
    p: float
    e: float
    yields: YieldBounds
    e_ph: object
    rate: object


def evaluate_outcome(
    gains: GainsTable,
    x_stats: XBasisStats,
    alpha2,
    s: IntensityTriple,
    outcome,
    params: ProtocolParams = ProtocolParams(),
    selection: str = "positive",
) -> DetectorResult:
    """Run yields -> phase error -> rate for one outcome.

    ``alpha2`` and the members of ``s`` may be arrays, in which case the
    yields, phase error and rate come back as arrays of the broadcast shape.
    """
    outcome = Outcome.parse(outcome)
    p = click_probability(x_stats, outcome)
    e = qber(x_stats, outcome)
    y = yield_bounds(gains, s, outcome, selection)
    e_ph = phase_error_upper(y, alpha2, p, params)
    return DetectorResult(outcome, p, e, y, e_ph, rate_per_detector(p, e, e_ph, params))


def evaluate_rates(gains, x_stats, alpha2, s, params=ProtocolParams(), selection="positive"):
    """Return ``(R10, R01)`` for the given data and intensity setting(s)."""
    return tuple(
        evaluate_outcome(gains, x_stats, alpha2, s, o, params, selection).rate for o in Outcome
    )
