"""Expected detection statistics of a lossy twin-field link, and the PLOB bound.

Both arms have transmittance ``sqrt(eta)``.  The two pulses meet on a 50:50
beam splitter whose outputs feed threshold detectors D0 and D1 with
per-gate dark-count probability ``pd``; imperfect mode overlap is modelled
by a visibility ``v`` that scales the interference term.  A detector that
receives a Poisson-distributed field of mean ``lam`` stays silent with
probability ``(1 - pd) * exp(-lam)``.

Detector efficiency is assumed to be folded into the total loss.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple

import numpy as np

from .decoy_bounds import INTENSITY_NAMES, GainsTable, IntensityTriple
from .key_rate import ProtocolParams, XBasisStats
from .pipeline import evaluate_rates

__all__ = [
    "DEFAULT_DARK_COUNT_PROB",
    "DEFAULT_VISIBILITY",
    "ChannelParams",
    "CurvePoint",
    "transmittance",
    "exclusive_clicks",
    "simulate_x_stats",
    "simulate_gains",
    "simulate_rate",
    "plob_bound",
    "plob_bound_db",
    "sweep_curve",
]

# 750 Hz dark rate over a 900 ps detection window
DEFAULT_DARK_COUNT_PROB = 750.0 * 900e-12
DEFAULT_VISIBILITY = 0.998
DEFAULT_NODES = 2048


@dataclass(frozen=True)
class ChannelParams:
    total_loss_db: float
    dark_count_prob: float = DEFAULT_DARK_COUNT_PROB
    visibility: float = DEFAULT_VISIBILITY

    def __post_init__(self):
        if not self.total_loss_db >= 0:
            raise ValueError(f"total_loss_db must be >= 0, got {self.total_loss_db}")
        if not 0 <= self.dark_count_prob < 1:
            raise ValueError(f"dark_count_prob must lie in [0, 1), got {self.dark_count_prob}")
        if not 0 <= self.visibility <= 1:
            raise ValueError(f"visibility must lie in [0, 1], got {self.visibility}")

    @property
    def eta(self) -> float:
        return transmittance(self.total_loss_db)


class CurvePoint(NamedTuple):
    loss_db: float
    rate: float
    plob: float


def transmittance(loss_db):
    """End-to-end transmittance ``10^(-loss/10)``."""
    eta = 10.0 ** (-np.asarray(loss_db, dtype=float) / 10.0)
    return float(eta) if eta.ndim == 0 else eta


def exclusive_clicks(lam0, lam1, pd):
    """``(p(D0 only), p(D1 only))`` for Poisson means ``lam0``, ``lam1`` at the detectors."""
    silent0 = (1 - pd) * np.exp(-np.asarray(lam0, dtype=float))
    silent1 = (1 - pd) * np.exp(-np.asarray(lam1, dtype=float))
    return (1 - silent0) * silent1, (1 - silent1) * silent0


def simulate_x_stats(ch: ChannelParams, alpha2: float) -> XBasisStats:
    """Expected ``p(outcome | b_A, b_B)`` for X-basis signals of mean photon number ``alpha2``."""
    if alpha2 < 0:
        raise ValueError("alpha2 must be non-negative")
    root_eta = math.sqrt(ch.eta)
    p = np.empty((2, 2, 2))
    for bA in (0, 1):
        for bB in (0, 1):
            cos_delta = math.cos(math.pi * (bA ^ bB))
            lam0 = alpha2 * root_eta * (1 + ch.visibility * cos_delta)
            lam1 = alpha2 * root_eta * (1 - ch.visibility * cos_delta)
            p[bA, bB] = exclusive_clicks(lam0, lam1, ch.dark_count_prob)
    return XBasisStats(p)


def simulate_gains(ch: ChannelParams, s: IntensityTriple, nodes: int = DEFAULT_NODES) -> GainsTable:
    """Expected Z-basis gains, averaging the relative phase over ``[0, 2*pi)``.

    The integrand is smooth and periodic, so the uniform trapezoid rule with
    ``nodes`` points converges spectrally.
    """
    if nodes < 2:
        raise ValueError("need at least 2 quadrature nodes")
    root_eta = math.sqrt(ch.eta)
    cos_phi = np.cos(2 * np.pi * np.arange(nodes) / nodes)
    vals = [float(s[k]) for k in INTENSITY_NAMES]
    q = np.empty((3, 3, 2))
    for i, a in enumerate(vals):
        for j, b in enumerate(vals):
            mean = 0.5 * (a + b) * root_eta
            cross = ch.visibility * math.sqrt(a * b) * root_eta * cos_phi
            p10, p01 = exclusive_clicks(mean + cross, mean - cross, ch.dark_count_prob)
            q[i, j] = p10.mean(), p01.mean()
    return GainsTable(q)


def simulate_rate(
    ch: ChannelParams,
    alpha2: float,
    s: IntensityTriple,
    params: ProtocolParams = ProtocolParams(),
    nodes: int = DEFAULT_NODES,
    selection: str = "positive",
) -> float:
    """Total key rate ``R10 + R01`` predicted by the channel model."""
    r10, r01 = evaluate_rates(simulate_gains(ch, s, nodes), simulate_x_stats(ch, alpha2), alpha2, s, params, selection)
    return float(r10 + r01)


def plob_bound(eta) -> float:
    """Repeaterless secret-key capacity ``-log2(1 - eta)`` in bits per pulse."""
    if not 0 < eta < 1:
        raise ValueError(f"PLOB bound needs 0 < eta < 1 (diverges at eta = 1), got {eta}")
    return -math.log1p(-eta) / math.log(2)


def plob_bound_db(loss_db: float) -> float:
    if not loss_db > 0:
        raise ValueError(f"loss must be > 0 dB, got {loss_db}")
    return plob_bound(transmittance(loss_db))


def sweep_curve(
    ch_template: ChannelParams,
    alpha2: float,
    s: IntensityTriple,
    loss_grid: Iterable[float],
    params: ProtocolParams = ProtocolParams(),
    nodes: int = DEFAULT_NODES,
    selection: str = "positive",
) -> List[CurvePoint]:
    """Simulated key rate and PLOB bound at each loss of a monotone grid."""
    losses = [float(x) for x in loss_grid]
    if not losses:
        raise ValueError("loss grid is empty")
    steps = np.diff(losses)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("loss grid must be strictly monotone")
    out = []
    for loss in losses:
        ch = dataclasses.replace(ch_template, total_loss_db=loss)
        out.append(CurvePoint(loss, simulate_rate(ch, alpha2, s, params, nodes, selection), plob_bound_db(loss)))
    return out
