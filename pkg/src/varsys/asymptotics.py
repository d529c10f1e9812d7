"""Oscillation coefficients of sum_k F_k(t)/t^2 and the admissible lambda-intervals.

Four coefficients govern multiplicity:

* ``a_inf``  = liminf_{t->+inf} sum_k max_{|x|<=t} F_k(x) / t^2
* ``b_sup``  = limsup_{t->+inf} sum_k F_k(t) / t^2
* ``a_zero`` / ``b_zero``: the same with t -> 0+.

Limits cannot be computed from finitely many samples.  A profile therefore
either carries trusted analytic values or empirical tail estimates that are
explicitly labelled as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralError

__all__ = [
    "AsymptoticProfile",
    "ConditionVerdict",
    "LambdaInterval",
    "QuotientTail",
    "box_max",
    "estimate_quotient_tail",
    "geometric_sequence",
    "interval_constant",
    "lambda_interval",
    "oscillation_condition",
    "parse_extended",
]

INF = math.inf
ANALYTIC = "analytic"
EMPIRICAL = "empirical"
SCAN_RESOLUTION = 10_000
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def parse_extended(value):
    """Read an extended real: numbers, or the strings 'inf', '+inf', '-inf', 'zero'."""
    if isinstance(value, str):
        key = value.strip().lower()
        if key in ("inf", "+inf", "infinity", "+infinity"):
            return INF
        if key in ("-inf", "-infinity"):
            return -INF
        if key == "zero":
            return 0.0
        return float(key)
    return float(value)


def _golden_max(func, lo, hi, iters=60):
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = func(x1), func(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = func(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = func(x1)
    return max(f1, f2)


def box_max(component, t, resolution=SCAN_RESOLUTION):
    """Lower bound on max_{|x|<=t} F(x) by dense scan plus golden refinement.

    The scan step is t/resolution on [-t, t]; the best sample's two
    neighbouring cells are then refined by golden-section search.  F is
    only assumed continuous, so the result is a lower bound, exact for the
    monotone primitives of nonnegative f.
    """
    t = abs(float(t))
    if t == 0.0:
        return 0.0
    xs = np.linspace(-t, t, 2 * resolution + 1)
    values = np.asarray(component.integral(xs), dtype=float)
    best = int(np.argmax(values))
    found = float(values[best])
    step = t / resolution
    lo, hi = max(xs[best] - step, -t), min(xs[best] + step, t)
    if hi > lo:
        found = max(found, _golden_max(lambda x: float(component.integral(x)), lo, hi))
    return max(found, 0.0)  # F(0) = 0 lies in every box


@dataclass
class QuotientTail:
    """Quotients along a witness sequence with their running extremes."""

    sequence: list
    quotients: list
    running_inf: list
    running_sup: list
    mode: str
    direction: str
    status: str = EMPIRICAL

    @property
    def inf(self):
        return self.running_inf[-1]

    @property
    def sup(self):
        return self.running_sup[-1]


def estimate_quotient_tail(components, sequence, mode="pointwise", direction="infinity"):
    """Evaluate the A- or B-quotient along ``sequence``.

    ``mode="max-over-box"`` gives sum_k max_{|x|<=t} F_k(x) / t^2 (the
    A-coefficients), ``mode="pointwise"`` gives sum_k F_k(t) / t^2 (the
    B-coefficients).  The sequence must be strictly increasing for
    ``direction="infinity"`` and strictly decreasing for ``"zero"``.
    """
    seq = [float(t) for t in sequence]
    if len(seq) < 3:
        raise StructuralError("a quotient tail needs at least three sequence points")
    if any(t <= 0 for t in seq):
        raise StructuralError("sequence points must be positive (t = 0 cannot be a denominator)")
    diffs = np.diff(seq)
    if direction == "infinity" and not np.all(diffs > 0):
        raise StructuralError("sequence must be strictly increasing toward infinity")
    if direction == "zero" and not np.all(diffs < 0):
        raise StructuralError("sequence must be strictly decreasing toward zero")
    if direction not in ("infinity", "zero"):
        raise StructuralError(f"unknown direction {direction!r}")
    if mode not in ("max-over-box", "pointwise"):
        raise StructuralError(f"unknown mode {mode!r}")

    quotients = []
    for t in seq:
        if mode == "pointwise":
            total = sum(float(c.integral(t)) for c in components)
        else:
            total = sum(box_max(c, t) for c in components)
        quotients.append(total / (t * t))
    q = np.asarray(quotients)
    return QuotientTail(
        sequence=seq,
        quotients=quotients,
        running_inf=list(np.minimum.accumulate(q)),
        running_sup=list(np.maximum.accumulate(q)),
        mode=mode,
        direction=direction,
    )


def geometric_sequence(start, ratio, count):
    return [start * ratio**i for i in range(count)]


@dataclass
class AsymptoticProfile:
    """Oscillation coefficients with per-field provenance."""

    a_inf: float | None = None
    b_sup: float | None = None
    a_zero: float | None = None
    b_zero: float | None = None
    provenance: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)

    @classmethod
    def analytic(cls, **values):
        parsed = {k: parse_extended(v) for k, v in values.items() if v is not None}
        return cls(**parsed, provenance={k: ANALYTIC for k in parsed})

    @classmethod
    def empirical(cls, components, regime, a_sequence, b_sequence=None):
        """Estimate the coefficients of one regime from finite tails."""
        b_sequence = a_sequence if b_sequence is None else b_sequence
        a_tail = estimate_quotient_tail(components, a_sequence, "max-over-box", regime)
        b_tail = estimate_quotient_tail(components, b_sequence, "pointwise", regime)
        a_key, b_key = _keys(regime)
        return cls(
            **{a_key: a_tail.inf, b_key: b_tail.sup},
            provenance={a_key: EMPIRICAL, b_key: EMPIRICAL},
            witness={a_key: a_tail, b_key: b_tail},
        )

    def coefficients(self, regime):
        a_key, b_key = _keys(regime)
        a, b = getattr(self, a_key), getattr(self, b_key)
        if a is None or b is None:
            raise StructuralError(f"profile has no {a_key}/{b_key} values for regime {regime!r}")
        return a, b

    def is_certificate(self, regime):
        return all(self.provenance.get(k) == ANALYTIC for k in _keys(regime))


def _keys(regime):
    if regime == "infinity":
        return "a_inf", "b_sup"
    if regime == "zero":
        return "a_zero", "b_zero"
    raise StructuralError(f"regime must be 'infinity' or 'zero', got {regime!r}")


def interval_constant(matrix, L):
    """trace(A) + 2 sum_{i<j} a_ij + n L, i.e. 1^t A 1 + n L."""
    return matrix.ones_form + matrix.order * float(L)


@dataclass(frozen=True)
class ConditionVerdict:
    passed: bool
    regime: str
    a_coefficient: float
    b_coefficient: float
    factor: float  # (lambda_1 - L) / T
    rhs: float  # factor * B

    def describe(self):
        name = "h_inf^L" if self.regime == "infinity" else "h_0^L"
        verdict = "holds" if self.passed else "fails"
        return f"condition ({name}) {verdict}: {self.a_coefficient:.17g} < {self.rhs:.17g}"


def oscillation_condition(profile, matrix, L, regime="infinity"):
    """A < (lambda_1 - L) / T * B in extended-real arithmetic."""
    a, b = profile.coefficients(regime)
    t_const = interval_constant(matrix, L)
    factor = (matrix.lambda1 - L) / t_const
    if factor <= 0:
        rhs = -INF if b == INF else factor * b
        passed = False
    else:
        rhs = INF if b == INF else factor * b
        passed = bool(a < rhs)
    return ConditionVerdict(passed, regime, a, b, factor, rhs)


@dataclass(frozen=True)
class LambdaInterval:
    lower: float
    upper: float
    constant_T: float
    regime: str = "infinity"

    @property
    def empty(self):
        return not self.lower < self.upper

    def __contains__(self, lam):
        return self.lower < lam < self.upper


def lambda_interval(profile, matrix, L, regime="infinity"):
    """Open interval ] T / (2B), (lambda_1 - L) / (2A) [ with T = 1^t A 1 + n L.

    Division conventions: T / (2 * inf) = 0 and c / (2 * 0) = +inf for c > 0.
    A nonpositive B gives an empty interval (lower = +inf).
    """
    a, b = profile.coefficients(regime)
    t_const = interval_constant(matrix, L)
    gap = matrix.lambda1 - L
    if b == INF:
        lower = 0.0
    elif b > 0:
        lower = t_const / (2.0 * b)
    else:
        lower = INF
    if gap <= 0:
        upper = 0.0
    elif a == 0:
        upper = INF
    elif a == INF:
        upper = 0.0
    else:
        upper = gap / (2.0 * a)
    return LambdaInterval(lower, upper, t_const, regime)
