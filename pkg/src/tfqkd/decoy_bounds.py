"""Analytical decoy-state upper bounds on the photon-number yields.

The twin-field protocol needs upper bounds on four yields, ``Y00``, ``Y11``,
``Y02`` and ``Y20``, for each exclusive-click outcome.  They are estimated
from the Z-basis gains ``Q^{ab}`` measured with phase-randomised coherent
states of intensities ``a, b`` in ``{mu, nu, omega}``, where

    Q^{ab} = exp(-a - b) * sum_{n,m} a^n b^m / (n! m!) * Y_nm.

``Y00`` has a single closed form.  ``Y11``, ``Y02`` and ``Y20`` are each
bounded by a family of expressions, one per admissible assignment of the
three decoy intensities to the roles ``a1 > a0`` (and ``a1 > abar1 > a0``);
every member of the family is an upper bound in its own right.  The
``*_candidates`` functions return the whole family, the ``*_upper``
functions reduce it to a single number.

All functions accept scalar intensities or numpy arrays of intensities
(broadcast against each other), which lets callers evaluate a whole grid of
intensity settings in one call.  Gains are always fixed scalars.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

__all__ = [
    "INTENSITY_NAMES",
    "Outcome",
    "IntensityOrderError",
    "DegenerateIntensityError",
    "IntensityTriple",
    "GainsTable",
    "PairAssignment",
    "YieldBounds",
    "SELECTION_MODES",
    "y00_upper",
    "y11_candidates",
    "y02_candidates",
    "y20_candidates",
    "y11_upper",
    "y02_upper",
    "y20_upper",
    "yield_bounds",
    "select_bound",
]

INTENSITY_NAMES = ("mu", "nu", "omega")
SELECTION_MODES = ("positive", "all")


class Outcome(str, enum.Enum):
    """Exclusive-click announcement: only D0 fired, or only D1 fired."""

    D10 = "d10"
    D01 = "d01"

    @property
    def index(self) -> int:
        return 0 if self is Outcome.D10 else 1

    @classmethod
    def parse(cls, value) -> "Outcome":
        if isinstance(value, Outcome):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown outcome {value!r}; expected 'd10' or 'd01'") from None


class IntensityOrderError(ValueError):
    """Decoy intensities violate ``mu > nu > omega >= 0``."""


class DegenerateIntensityError(IntensityOrderError):
    """Two decoy intensities coincide, so a bound has a zero denominator."""


@dataclass(frozen=True)
class IntensityTriple:
    """Decoy intensities ``mu > nu > omega >= 0`` (mean photon numbers).

    Fields may be floats or broadcastable numpy arrays; the ordering is
    checked element-wise.
    """

    mu: object
    nu: object
    omega: object

    def __post_init__(self):
        mu, nu, om = (np.asarray(getattr(self, k), dtype=float) for k in INTENSITY_NAMES)
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(nu)) and np.all(np.isfinite(om))):
            raise IntensityOrderError("intensity ordering: intensities must be finite")
        if np.any(mu == nu) or np.any(nu == om) or np.any(mu == om):
            raise DegenerateIntensityError(
                "zero denominator: decoy intensities must be pairwise distinct"
            )
        if not (np.all(mu > nu) and np.all(nu > om) and np.all(om >= 0)):
            raise IntensityOrderError("intensity ordering: require mu > nu > omega >= 0")

    def __getitem__(self, name: str):
        if name not in INTENSITY_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in INTENSITY_NAMES}


class GainsTable:
    """Z-basis gains ``Q^{ab}`` for all nine intensity pairs and both outcomes.

    Stored as an array of shape ``(3, 3, 2)`` indexed by
    ``[alice intensity, bob intensity, outcome]`` in the order of
    :data:`INTENSITY_NAMES` and ``(d10, d01)``.
    """

    __slots__ = ("_q",)

    def __init__(self, values):
        q = np.array(values, dtype=float)
        if q.shape != (3, 3, 2):
            raise ValueError(f"gains must have shape (3, 3, 2), got {q.shape}")
        if not np.all(np.isfinite(q)) or np.any(q < 0) or np.any(q > 1):
            raise ValueError("probability out of range: every gain must lie in [0, 1]")
        if np.any(q.sum(axis=2) > 1):
            raise ValueError("probability out of range: d10 + d01 exceeds 1 for some pair")
        q.setflags(write=False)
        self._q = q

    @classmethod
    def from_mapping(cls, data: Mapping[str, Mapping[str, float]]) -> "GainsTable":
        """Build from ``{"mu,nu": {"d10": ..., "d01": ...}, ...}``."""
        q = np.empty((3, 3, 2))
        for (i, a), (j, b) in itertools.product(enumerate(INTENSITY_NAMES), repeat=2):
            entry = data[f"{a},{b}"]
            q[i, j, 0] = entry["d10"]
            q[i, j, 1] = entry["d01"]
        return cls(q)

    def to_mapping(self) -> dict:
        out = {}
        for (i, a), (j, b) in itertools.product(enumerate(INTENSITY_NAMES), repeat=2):
            out[f"{a},{b}"] = {"d10": float(self._q[i, j, 0]), "d01": float(self._q[i, j, 1])}
        return out

    @property
    def values(self) -> np.ndarray:
        return self._q

    def q(self, a: str, b: str, outcome) -> float:
        o = Outcome.parse(outcome).index
        return float(self._q[INTENSITY_NAMES.index(a), INTENSITY_NAMES.index(b), o])

    def __eq__(self, other):
        return isinstance(other, GainsTable) and np.array_equal(self._q, other._q)

    def __repr__(self):
        return f"GainsTable({self._q.tolist()!r})"


@dataclass(frozen=True)
class PairAssignment:
    """Roles of the decoy intensities in one candidate bound.

    ``a*`` are Alice's intensities and ``b*`` Bob's; ``abar1`` / ``bbar1``
    are the middle intensities used by the second-difference bounds.
    """

    a1: str
    a0: str
    b1: str
    b0: str
    abar1: Optional[str] = None
    bbar1: Optional[str] = None

    @property
    def label(self) -> str:
        a = f"{self.a1}>{self.abar1}>{self.a0}" if self.abar1 else f"{self.a1}>{self.a0}"
        b = f"{self.b1}>{self.bbar1}>{self.b0}" if self.bbar1 else f"{self.b1}>{self.b0}"
        return f"A[{a}] B[{b}]"

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class YieldBounds:
    """Upper bounds on ``Y00, Y11, Y02, Y20`` for one outcome, each in [0, 1]."""

    y00: object
    y11: object
    y02: object
    y20: object

    def as_dict(self) -> dict:
        return {"y00": self.y00, "y11": self.y11, "y02": self.y02, "y20": self.y20}


# ---------------------------------------------------------------------------
# helpers


def _ordered_pairs():
    # (high, low) pairs drawn from the triple; names are listed high to low
    return list(itertools.combinations(INTENSITY_NAMES, 2))


def _exp_gain(gains: GainsTable, s: IntensityTriple, o: int):
    """Return ``f(a, b) = exp(a + b) * Q^{ab}`` closing over the data."""
    q = gains.values

    def f(a: str, b: str):
        i, j = INTENSITY_NAMES.index(a), INTENSITY_NAMES.index(b)
        return np.exp(np.asarray(s[a], dtype=float) + s[b]) * q[i, j, o]

    return f


def _tail2(x):
    """``exp(x) - 1 - x``, the Poisson tail sum over n >= 2 of x^n / n!."""
    return np.expm1(x) - x


def _tail3(x):
    """``exp(x) - 1 - x - x^2/2``, the tail sum over n >= 3 of x^n / n!."""
    return np.expm1(x) - x - 0.5 * x * x


def _scalar(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def select_bound(candidates: Mapping[PairAssignment, object], selection: str = "positive"):
    """Reduce a family of candidate upper bounds to one value in [0, 1].

    ``"positive"`` takes the minimum over strictly positive candidates and
    returns 0 when none is positive.  A negative candidate cannot arise from
    data that obey the Poisson model exactly; it only appears when
    statistical fluctuations push a finite-difference estimate below zero,
    so it is discarded rather than allowed to zero out the bound.

    ``"all"`` takes the plain minimum over every candidate and clamps the
    result to [0, 1].
    """
    if selection not in SELECTION_MODES:
        raise ValueError(f"selection must be one of {SELECTION_MODES}, got {selection!r}")
    stacked = np.stack(np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in candidates.values()]))
    if selection == "positive":
        masked = np.where(stacked > 0, stacked, np.inf)
        best = masked.min(axis=0)
        best = np.where(np.isinf(best), 0.0, best)
    else:
        best = stacked.min(axis=0)
    return _scalar(np.clip(best, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Y00


def y00_upper(gains: GainsTable, s: IntensityTriple, outcome):
    """Upper bound on the vacuum-vacuum yield ``Y00``, clamped to [0, 1]."""
    o = Outcome.parse(outcome).index
    q = gains.values[:, :, o]
    mu, nu, om = (np.asarray(s[k], dtype=float) for k in INTENSITY_NAMES)
    val = {"mu": mu, "nu": nu, "omega": om}
    idx = {k: i for i, k in enumerate(INTENSITY_NAMES)}

    def delta(x, y):
        X, Y = val[x], val[y]
        i, j = idx[x], idx[y]
        return (
            Y**2 * np.exp(2 * X) * q[i, i]
            + X**2 * np.exp(2 * Y) * q[j, j]
            - X * Y * np.exp(X + Y) * (q[i, j] + q[j, i])
        )

    num = (
        om**2 * delta("mu", "nu") / (mu - nu)
        - nu**2 * delta("mu", "omega") / (mu - om)
        + mu**2 * delta("nu", "omega") / (nu - om)
    )
    return _scalar(np.clip(num / ((mu - nu) * (mu - om) * (nu - om)), 0.0, 1.0))


# ---------------------------------------------------------------------------
# Y11


def _gamma_bound(E, s, a1, a0, b1, b0):
    gamma = E(a0, b0) + E(a1, b1) - E(a0, b1) - E(a1, b0)
    return gamma / ((s[a1] - s[a0]) * (s[b1] - s[b0]))


def _xi_bound(E, s, a1, abar1, a0, b1, bbar1, b0):
    A1, Ab, A0 = (np.asarray(s[k], dtype=float) for k in (a1, abar1, a0))
    B1, Bb, B0 = (np.asarray(s[k], dtype=float) for k in (b1, bbar1, b0))

    def block(x1, x0, y1, y0):
        return E(x1, y1) - E(x1, y0) - E(x0, y1) + E(x0, y0)

    xi = (
        (Ab**2 - A0**2) * (Bb**2 - B0**2) * block(a1, a0, b1, b0)
        - (Ab**2 - A0**2) * (B1**2 - B0**2) * block(a1, a0, bbar1, b0)
        - (A1**2 - A0**2) * (Bb**2 - B0**2) * block(abar1, a0, b1, b0)
        + (A1**2 - A0**2) * (B1**2 - B0**2) * block(abar1, a0, bbar1, b0)
    )
    # both coefficients are <= 0 for x1 > xbar > x0
    ka = (Ab**2 - A0**2) * (A1 - A0) - (A1**2 - A0**2) * (Ab - A0)
    kb = (Bb**2 - B0**2) * (B1 - B0) - (B1**2 - B0**2) * (Bb - B0)
    tail_a = (Ab**2 - A0**2) * (_tail3(A1) - _tail3(A0)) - (A1**2 - A0**2) * (_tail3(Ab) - _tail3(A0))
    tail_b = (Bb**2 - B0**2) * (_tail3(B1) - _tail3(B0)) - (B1**2 - B0**2) * (_tail3(Bb) - _tail3(B0))
    zeta = ka * tail_b + kb * tail_a
    return (xi - zeta) / (ka * kb)


def y11_candidates(gains: GainsTable, s: IntensityTriple, outcome) -> dict:
    """Every admissible candidate bound on ``Y11`` (unclamped).

    Nine first-difference candidates, one per choice of ``a1 > a0`` and
    ``b1 > b0``, plus the second-difference candidate with
    ``a1 > abar1 > a0 = mu > nu > omega`` on both sides.
    """
    E = _exp_gain(gains, s, Outcome.parse(outcome).index)
    out = {}
    for (a1, a0), (b1, b0) in itertools.product(_ordered_pairs(), repeat=2):
        out[PairAssignment(a1, a0, b1, b0)] = _scalar(_gamma_bound(E, s, a1, a0, b1, b0))
    hi, mid, lo = INTENSITY_NAMES
    out[PairAssignment(hi, lo, hi, lo, abar1=mid, bbar1=mid)] = _scalar(
        _xi_bound(E, s, hi, mid, lo, hi, mid, lo)
    )
    return out


def y11_upper(gains: GainsTable, s: IntensityTriple, outcome, selection: str = "positive"):
    """Upper bound on ``Y11``; see :func:`select_bound` for ``selection``."""
    return select_bound(y11_candidates(gains, s, outcome), selection)


# ---------------------------------------------------------------------------
# Y02 / Y20


def _omega_bound(E, s, a1, a0, b1, bbar1, b0):
    A1, A0 = np.asarray(s[a1], dtype=float), np.asarray(s[a0], dtype=float)
    B1, Bb, B0 = (np.asarray(s[k], dtype=float) for k in (b1, bbar1, b0))
    omega_ = (
        (B1 - Bb) * (A1 * E(a0, b0) - A0 * E(a1, b0))
        + (B1 - B0) * (A0 * E(a1, bbar1) - A1 * E(a0, bbar1))
        + (Bb - B0) * (A1 * E(a0, b1) - A0 * E(a1, b1))
    )
    lam = (A0 * -np.expm1(A1) - A1 * -np.expm1(A0)) * (
        (Bb - B0) * (_tail2(B1) - _tail2(B0)) - (B1 - B0) * (_tail2(Bb) - _tail2(B0))
    )
    return 2.0 * (omega_ - lam) / ((A1 - A0) * (B1 - B0) * (Bb - B0) * (B1 - Bb))


def _lambda_bound(E, s, a1, abar1, a0, b1, b0):
    A1, Ab, A0 = (np.asarray(s[k], dtype=float) for k in (a1, abar1, a0))
    B1, B0 = np.asarray(s[b1], dtype=float), np.asarray(s[b0], dtype=float)
    lam_ = (
        (A1 - Ab) * (B1 * E(a0, b0) - B0 * E(a0, b1))
        + (A1 - A0) * (B0 * E(abar1, b1) - B1 * E(abar1, b0))
        + (Ab - A0) * (B1 * E(a1, b0) - B0 * E(a1, b1))
    )
    tau = ((Ab - A0) * (_tail2(A1) - _tail2(A0)) - (A1 - A0) * (_tail2(Ab) - _tail2(A0))) * (
        B0 * -np.expm1(B1) - B1 * -np.expm1(B0)
    )
    return 2.0 * (lam_ - tau) / ((A1 - A0) * (Ab - A0) * (A1 - Ab) * (B1 - B0))


def y02_candidates(gains: GainsTable, s: IntensityTriple, outcome) -> dict:
    """Candidate bounds on ``Y02``: Bob uses ``mu > nu > omega``, Alice any ``a1 > a0``."""
    E = _exp_gain(gains, s, Outcome.parse(outcome).index)
    hi, mid, lo = INTENSITY_NAMES
    return {
        PairAssignment(a1, a0, hi, lo, bbar1=mid): _scalar(_omega_bound(E, s, a1, a0, hi, mid, lo))
        for a1, a0 in _ordered_pairs()
    }


def y20_candidates(gains: GainsTable, s: IntensityTriple, outcome) -> dict:
    """Candidate bounds on ``Y20``: the mirror image of :func:`y02_candidates`."""
    E = _exp_gain(gains, s, Outcome.parse(outcome).index)
    hi, mid, lo = INTENSITY_NAMES
    return {
        PairAssignment(hi, lo, b1, b0, abar1=mid): _scalar(_lambda_bound(E, s, hi, mid, lo, b1, b0))
        for b1, b0 in _ordered_pairs()
    }


def y02_upper(gains: GainsTable, s: IntensityTriple, outcome, selection: str = "positive"):
    return select_bound(y02_candidates(gains, s, outcome), selection)


def y20_upper(gains: GainsTable, s: IntensityTriple, outcome, selection: str = "positive"):
    return select_bound(y20_candidates(gains, s, outcome), selection)


def yield_bounds(gains: GainsTable, s: IntensityTriple, outcome, selection: str = "positive") -> YieldBounds:
    """All four yield bounds for one outcome."""
    return YieldBounds(
        y00=y00_upper(gains, s, outcome),
        y11=y11_upper(gains, s, outcome, selection),
        y02=y02_upper(gains, s, outcome, selection),
        y20=y20_upper(gains, s, outcome, selection),
    )
