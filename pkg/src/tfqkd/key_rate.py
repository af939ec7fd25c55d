"""Click probabilities, bit- and phase-error rates, and the asymptotic key rate.

X-basis signals are coherent states ``|+alpha>`` / ``|-alpha>`` encoding the
bits ``b_A`` and ``b_B``.  From the conditional exclusive-click statistics
``p(outcome | b_A, b_B)`` we obtain the click probability and QBER per
outcome; together with the yield bounds from :mod:`tfqkd.decoy_bounds` these
give a phase-error bound and the per-outcome key rate

    R = max{ p_X^2 * p * [1 - f_EC * h(e) - h(e_ph)], 0 }.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .decoy_bounds import Outcome, YieldBounds

__all__ = [
    "BIT_PAIR_PRIOR",
    "XBasisStats",
    "ProtocolParams",
    "click_probability",
    "qber",
    "coherent_coeffs",
    "residuals",
    "phase_error_upper",
    "binary_entropy",
    "rate_per_detector",
    "total_rate",
]

# Alice and Bob pick their bits uniformly
BIT_PAIR_PRIOR = 0.25

_BIT_KEYS = ("00", "01", "10", "11")


class XBasisStats:
    """Conditional exclusive-click probabilities ``p(outcome | b_A, b_B)``.

    Array of shape ``(2, 2, 2)`` indexed ``[b_A, b_B, outcome]``.
    """

    __slots__ = ("_p",)

    def __init__(self, values):
        p = np.array(values, dtype=float)
        if p.shape != (2, 2, 2):
            raise ValueError(f"x-basis statistics must have shape (2, 2, 2), got {p.shape}")
        if not np.all(np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
            raise ValueError("probability out of range: every x-basis entry must lie in [0, 1]")
        if np.any(p.sum(axis=2) > 1):
            raise ValueError("probability out of range: d10 + d01 exceeds 1 for some bit pair")
        p.setflags(write=False)
        self._p = p

    @classmethod
    def from_mapping(cls, data) -> "XBasisStats":
        """Build from ``{"00": {"d10": ..., "d01": ...}, "01": ..., ...}``."""
        p = np.empty((2, 2, 2))
        for key in _BIT_KEYS:
            bA, bB = int(key[0]), int(key[1])
            p[bA, bB, 0] = data[key]["d10"]
            p[bA, bB, 1] = data[key]["d01"]
        return cls(p)

    def to_mapping(self) -> dict:
        return {
            k: {"d10": float(self._p[int(k[0]), int(k[1]), 0]), "d01": float(self._p[int(k[0]), int(k[1]), 1])}
            for k in _BIT_KEYS
        }

    @property
    def values(self) -> np.ndarray:
        return self._p

    def __eq__(self, other):
        return isinstance(other, XBasisStats) and np.array_equal(self._p, other._p)

    def __repr__(self):
        return f"XBasisStats({self._p.tolist()!r})"


@dataclass(frozen=True)
class ProtocolParams:
    """Post-processing parameters.

    Attributes
    ----------
    f_ec : float
        Error-correction inefficiency, >= 1.
    p_x : float
        Probability of choosing the X basis; 1 in the asymptotic limit.
    series_cutoff : int
        Largest photon number kept in the residual sums.
    """

    f_ec: float = 1.16
    p_x: float = 1.0
    series_cutoff: int = 60

    def __post_init__(self):
        if not self.f_ec >= 1:
            raise ValueError(f"f_ec must be >= 1, got {self.f_ec}")
        if not 0 < self.p_x <= 1:
            raise ValueError(f"p_x must lie in (0, 1], got {self.p_x}")
        if int(self.series_cutoff) != self.series_cutoff or self.series_cutoff < 10:
            raise ValueError(f"series_cutoff must be an integer >= 10, got {self.series_cutoff}")


def _error_mask(outcome: Outcome) -> np.ndarray:
    # D0 clicks key on b_A xor b_B = 0, D1 clicks flip Bob's bit
    mask = np.zeros((2, 2), dtype=bool)
    for bA, bB in itertools.product((0, 1), repeat=2):
        mask[bA, bB] = (bA ^ bB) == 1 if outcome is Outcome.D10 else bA == bB
    return mask


def click_probability(stats: XBasisStats, outcome) -> float:
    """Probability of the exclusive-click ``outcome`` averaged over bit pairs."""
    o = Outcome.parse(outcome).index
    return float(BIT_PAIR_PRIOR * stats.values[:, :, o].sum())


def qber(stats: XBasisStats, outcome) -> float:
    """X-basis bit-error rate for ``outcome``.

    Raises
    ------
    ValueError
        If the outcome never occurs (undefined QBER).
    """
    outcome = Outcome.parse(outcome)
    p = click_probability(stats, outcome)
    if p <= 0:
        raise ValueError(f"undefined QBER: click probability for {outcome.value} is zero")
    errors = stats.values[:, :, outcome.index][_error_mask(outcome)].sum()
    return float(BIT_PAIR_PRIOR * errors / p)


def coherent_coeffs(alpha2, n):
    """Poisson amplitude ``c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)``, ``alpha = +sqrt(alpha2)``.

    ``n`` is an int (returns ``c_n``) or an upper index given as ``range``-like
    ``np.arange`` (returns the vector ``c_0 .. c_N`` along a new leading axis).
    """
    alpha2 = np.asarray(alpha2, dtype=float)
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("photon number must be non-negative")
    top = int(n_arr.max()) if n_arr.size else 0
    c = _coeff_table(alpha2, top)
    out = c[n_arr]
    return float(out) if out.ndim == 0 else out


def _coeff_table(alpha2: np.ndarray, cutoff: int) -> np.ndarray:
    # recurrence c_n = c_{n-1} sqrt(alpha2 / n) stays finite for alpha2 = 0
    c = np.empty((cutoff + 1,) + alpha2.shape)
    c[0] = np.exp(-alpha2 / 2)
    for k in range(1, cutoff + 1):
        c[k] = c[k - 1] * np.sqrt(alpha2 / k)
    return c


def residuals(alpha2, cutoff: int = 60):
    """Residual parameters ``(delta, delta_bar)`` of the phase-error bound.

    ``delta = (sum_even c_n)^2 - c_0^2 - 2 c_0 c_2`` and
    ``delta_bar = (sum_odd c_n)^2 - c_1^2``, evaluated in expanded form so
    that the small tails are not lost to cancellation.
    """
    if cutoff < 10:
        raise ValueError("cutoff must be >= 10")
    c = _coeff_table(np.asarray(alpha2, dtype=float), int(cutoff))
    even_tail = c[4::2].sum(axis=0)
    odd_tail = c[3::2].sum(axis=0)
    c0, c1, c2 = c[0], c[1], c[2]
    delta = c2 * c2 + 2 * (c0 + c2) * even_tail + even_tail * even_tail
    delta_bar = 2 * c1 * odd_tail + odd_tail * odd_tail
    if delta.ndim == 0:
        return float(delta), float(delta_bar)
    return delta, delta_bar


def phase_error_upper(y: YieldBounds, alpha2, p_click, params: ProtocolParams = ProtocolParams()):
    """Upper bound on the phase-error rate, clamped to at most 1."""
    p_click = np.asarray(p_click, dtype=float)
    if np.any(p_click <= 0):
        raise ValueError("phase-error bound undefined for zero click probability")
    alpha2 = np.asarray(alpha2, dtype=float)
    c = _coeff_table(alpha2, 2)
    delta, delta_bar = residuals(alpha2, params.series_cutoff)
    even = c[0] ** 2 * np.sqrt(y.y00) + c[0] * c[2] * (np.sqrt(y.y02) + np.sqrt(y.y20)) + delta
    odd = c[1] ** 2 * np.sqrt(y.y11) + delta_bar
    e_ph = np.minimum((even**2 + odd**2) / p_click, 1.0)
    return float(e_ph) if np.ndim(e_ph) == 0 else e_ph


def binary_entropy(x):
    """Binary Shannon entropy in bits, with ``h(0) = h(1) = 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(~((x >= 0) & (x <= 1))):
        raise ValueError("binary entropy is defined on [0, 1] only")
    inner = (x > 0) & (x < 1)
    xs = np.where(inner, x, 0.5)
    h = np.where(inner, -xs * np.log2(xs) - (1 - xs) * np.log2(1 - xs), 0.0)
    return float(h) if h.ndim == 0 else h


def rate_per_detector(p_click, e, e_ph, params: ProtocolParams = ProtocolParams()):
    """Key rate (bits per pulse) contributed by one exclusive-click outcome."""
    bracket = 1 - params.f_ec * binary_entropy(e) - binary_entropy(e_ph)
    r = np.maximum(params.p_x**2 * np.asarray(p_click, dtype=float) * bracket, 0.0)
    return float(r) if np.ndim(r) == 0 else r


def total_rate(r10, r01):
    if np.any(np.asarray(r10) < 0) or np.any(np.asarray(r01) < 0):
        raise ValueError("per-detector rates must be non-negative")
    return r10 + r01
