"""Component functions f_k, Lipschitz perturbations h_k and their primitives.

A :class:`ComponentFunction` wraps a scalar evaluator together with an
optional closed-form primitive and derivative.  Missing primitives fall back
to adaptive Simpson quadrature; missing derivatives to central differences.
Evaluators must be pure: the solver may call them from several threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, NumericalError, StructuralError

__all__ = [
    "ComponentFunction",
    "LipschitzCheck",
    "LipschitzEstimate",
    "Nonlinearity",
    "Perturbation",
    "adaptive_simpson",
    "check_lipschitz_condition",
    "estimate_lipschitz",
    "make_function",
    "primitive_value",
]

QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 40
QUAD_MIN_DEPTH = 4


def adaptive_simpson(func, a, b, tol=QUAD_TOL, max_depth=QUAD_MAX_DEPTH, min_depth=QUAD_MIN_DEPTH):
    """Integrate ``func`` over [a, b] by adaptive Simpson bisection.

    Returns ``(value, error_estimate)``.  A panel is accepted when
    ``|S_left + S_right - S_whole| <= 15 * tol_panel`` and the Richardson
    correction is added.  Panels are always split ``min_depth`` times first so
    that a narrow bump cannot hide between the three initial nodes.  Raises :class:`NumericalError` if some panel still
    fails the test at ``max_depth``.
    """
    if a == b:
        return 0.0, 0.0
    fa, fm, fb = func(a), func(0.5 * (a + b)), func(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    total = 0.0
    error = 0.0
    failed = False
    # explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = func(lm), func(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - s
        if depth >= min_depth and (abs(delta) <= 15.0 * eps or depth >= max_depth):
            if abs(delta) > 15.0 * eps:
                failed = True
            total += left + right + delta / 15.0
            error += abs(delta) / 15.0
            continue
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    if failed:
        raise NumericalError(
            "adaptive Simpson hit the depth cap", interval=(a, b), error_estimate=error, tolerance=tol
        )
    return total, error


@dataclass(frozen=True)
class ComponentFunction:
    """Continuous scalar function with optional closed-form primitive/derivative.

    ``evaluator``, ``primitive`` and ``derivative`` accept floats or numpy
    arrays.  ``lipschitz`` is an analytic global Lipschitz constant when one is
    known (used as the default declaration for perturbations).
    """

    evaluator: Callable
    primitive: Optional[Callable] = None
    derivative: Optional[Callable] = None
    lipschitz: Optional[float] = None
    name: str = "f"
    source: object = None  # generating object (e.g. a SpikeTrain), if any

    def __call__(self, t):
        return self.evaluator(t)

    def integral(self, t):
        """F(t) = int_0^t f; vectorized over arrays."""
        if self.primitive is not None:
            return self.primitive(t)
        if np.ndim(t) == 0:
            return primitive_value(self, float(t))
        return np.array([primitive_value(self, float(x)) for x in np.ravel(t)]).reshape(np.shape(t))

    def slope(self, t):
        """f'(t); central differences when no closed form is attached."""
        if self.derivative is not None:
            return self.derivative(t)
        t = np.asarray(t, dtype=float)
        step = 1e-6 * np.maximum(1.0, np.abs(t))
        return (self.evaluator(t + step) - self.evaluator(t - step)) / (2.0 * step)


def primitive_value(c, t, tol=QUAD_TOL):
    """int_0^t c(xi) dxi, closed form when available, else adaptive Simpson.

    Orientation is respected: for t < 0 the result is -int_t^0.
    """
    if c.primitive is not None:
        return float(c.primitive(t))
    if t == 0:
        return 0.0
    value, _ = adaptive_simpson(lambda x: float(c.evaluator(x)), 0.0, float(t), tol=tol)
    return value


class Nonlinearity:
    """The vector field f(u) = (f_1(u_1), ..., f_n(u_n))."""

    def __init__(self, components: Sequence[ComponentFunction]):
        if len(components) == 0:
            raise StructuralError("need at least one component function")
        self.components = tuple(components)

    @classmethod
    def broadcast(cls, component, n):
        return cls([component] * n)

    def __len__(self):
        return len(self.components)

    def _shared(self):
        first = self.components[0]
        return first if all(c is first for c in self.components) else None

    def _apply(self, attr, u):
        u = np.asarray(u, dtype=float)
        shared = self._shared()
        if shared is not None:
            return np.asarray(getattr(shared, attr)(u), dtype=float).reshape(u.shape)
        return np.array([float(getattr(c, attr)(x)) for c, x in zip(self.components, u)])

    def values(self, u):
        return self._apply("__call__", u)

    def primitives(self, u):
        return self._apply("integral", u)

    def slopes(self, u):
        return self._apply("slope", u)


class Perturbation(Nonlinearity):
    """Lipschitz perturbation h with declared constants L_k and L = max L_k.

    Construction checks h_k(0) = 0.  When no constant is declared, the
    component's analytic constant is used; if that is missing too the
    declaration is left as ``None`` and must be supplied or estimated.
    """

    def __init__(self, components, lipschitz_constants=None):
        super().__init__(components)
        for k, c in enumerate(self.components):
            at_zero = float(c(0.0))
            if at_zero != 0.0:
                raise StructuralError(f"h_{k + 1}(0) = {at_zero} but perturbations must vanish at 0")
        if lipschitz_constants is None:
            lipschitz_constants = [c.lipschitz for c in self.components]
        elif np.ndim(lipschitz_constants) == 0:
            lipschitz_constants = [float(lipschitz_constants)] * len(self.components)
        if len(lipschitz_constants) != len(self.components):
            raise StructuralError("one Lipschitz constant per component is required")
        if any(x is None for x in lipschitz_constants):
            raise StructuralError("Lipschitz constant missing for a perturbation component")
        if any(x < 0 for x in lipschitz_constants):
            raise StructuralError("Lipschitz constants must be nonnegative")
        self.lipschitz_constants = tuple(float(x) for x in lipschitz_constants)

    @classmethod
    def zero(cls, n):
        return cls([ZERO] * n, [0.0] * n)

    @classmethod
    def broadcast(cls, component, n, lipschitz=None):
        return cls([component] * n, None if lipschitz is None else [lipschitz] * n)

    @property
    def L(self):
        return max(self.lipschitz_constants)


@dataclass
class LipschitzEstimate:
    estimates: list
    declared: list
    falsified: list = field(default_factory=list)

    @property
    def any_falsified(self):
        return any(self.falsified)


def _van_der_corput(count, base=2):
    out = np.empty(count)
    for i in range(count):
        x, denom, k = 0.0, 1.0, i + 1
        while k:
            k, rem = divmod(k, base)
            denom *= base
            x += rem / denom
        out[i] = x
    return out


def estimate_lipschitz(p, radius, samples=1000, seed=0, slack=1e-9):
    """Empirical lower bounds for the Lipschitz constants of ``p`` on [-R, R].

    The sample set is the two endpoints, the first ``samples`` points of a van
    der Corput sequence and ``samples`` seeded random pairs (t, t + R/1000).
    Because the maximum chord slope of a point set is attained by neighbours
    in sorted order, only adjacent differences are needed; and since the set
    for ``samples`` is contained in the set for any larger count, the
    estimate never decreases as ``samples`` grows.

    A finite sample can only refute a declared constant, never certify it.
    """
    if not radius > 0:
        raise ValueError("degenerate box: radius must be positive")
    if samples < 2:
        raise ValueError("need at least two samples")
    rng = np.random.default_rng(seed)
    draws = rng.uniform(-radius, radius, size=samples)
    grid = -radius + 2.0 * radius * _van_der_corput(samples)
    delta = radius * 1e-3
    points = np.unique(np.concatenate([[-radius, radius], grid, draws, np.minimum(draws + delta, radius)]))
    estimates = []
    for c in p.components:
        values = np.asarray(c(points), dtype=float)
        slopes = np.abs(np.diff(values)) / np.diff(points)
        estimates.append(float(np.max(slopes)) if slopes.size else 0.0)
    declared = list(getattr(p, "lipschitz_constants", [None] * len(estimates)))
    falsified = [d is not None and e > d + slack for e, d in zip(estimates, declared)]
    return LipschitzEstimate(estimates, declared, falsified)


@dataclass(frozen=True)
class LipschitzCheck:
    passed: bool
    L: float
    lambda1: float

    @property
    def coercivity(self):
        """(lambda_1 - L) / 2, the coercivity coefficient of Phi."""
        return 0.5 * (self.lambda1 - self.L)


def check_lipschitz_condition(L, lambda1):
    """Strict test L < lambda_1."""
    return LipschitzCheck(passed=bool(L < lambda1), L=float(L), lambda1=float(lambda1))


# -- built-in catalog ---------------------------------------------------------


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0


ZERO = ComponentFunction(_zero, primitive=_zero, derivative=_zero, lipschitz=0.0, name="zero")


def polynomial(coefficients):
    """sum_j c_j t^j (ascending powers)."""
    coeffs = np.asarray(coefficients, dtype=float)
    poly = np.polynomial.Polynomial(coeffs)
    prim = poly.integ(lbnd=0.0)
    deriv = poly.deriv()
    lip = abs(float(coeffs[1])) if len(coeffs) == 2 else (0.0 if len(coeffs) <= 1 else None)
    return ComponentFunction(poly, primitive=prim, derivative=deriv, lipschitz=lip, name=f"poly{list(coeffs)}")


def sine(amplitude=1.0, frequency=1.0):
    a, w = float(amplitude), float(frequency)
    if w == 0:
        return ZERO
    return ComponentFunction(
        lambda t: a * np.sin(w * t),
        primitive=lambda t: a * (1.0 - np.cos(w * t)) / w,
        derivative=lambda t: a * w * np.cos(w * t),
        lipschitz=abs(a * w),
        name=f"{a}*sin({w}t)",
    )


def cosine(amplitude=1.0, frequency=1.0):
    a, w = float(amplitude), float(frequency)
    if w == 0:
        return polynomial([a])
    return ComponentFunction(
        lambda t: a * np.cos(w * t),
        primitive=lambda t: a * np.sin(w * t) / w,
        derivative=lambda t: -a * w * np.sin(w * t),
        lipschitz=abs(a * w),
        name=f"{a}*cos({w}t)",
    )


def table(points):
    """Linear interpolation through breakpoints, constant beyond the ends."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ConfigError("table needs at least two [x, y] breakpoints")
    xs, ys = pts[:, 0], pts[:, 1]
    if np.any(np.diff(xs) <= 0):
        raise ConfigError("table breakpoints must be strictly increasing")
    # extend with flat tails so the integral is a plain piecewise trapezoid
    slopes = np.diff(ys) / np.diff(xs)

    def value(t):
        return np.interp(t, xs, ys)

    def integral_from_left(t):
        t = np.asarray(t, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (ys[1:] + ys[:-1]) * np.diff(xs))])
        clipped = np.clip(t, xs[0], xs[-1])
        idx = np.clip(np.searchsorted(xs, clipped, side="right") - 1, 0, len(xs) - 2)
        x0 = xs[idx]
        piece = cum[idx] + (clipped - x0) * (ys[idx] + 0.5 * slopes[idx] * (clipped - x0))
        return piece + ys[0] * np.minimum(t - xs[0], 0.0) + ys[-1] * np.maximum(t - xs[-1], 0.0)

    def prim(t):
        out = integral_from_left(t) - integral_from_left(0.0)
        return float(out) if np.ndim(out) == 0 else out

    def deriv(t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(xs, t, side="right") - 1
        inside = (idx >= 0) & (idx < len(slopes))
        out = np.where(inside, slopes[np.clip(idx, 0, len(slopes) - 1)], 0.0)
        return float(out) if out.ndim == 0 else out

    return ComponentFunction(value, primitive=prim, derivative=deriv,
                             lipschitz=float(np.max(np.abs(slopes))), name="table")


def make_function(spec):
    """Build a catalog function from a config mapping ``{"kind": ..., ...}``."""
    from .spike_train import SpikeTrain

    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"function spec must be a mapping with a 'kind' field, got {spec!r}")
    params = {k: v for k, v in spec.items() if k != "kind"}
    kind = spec["kind"]
    try:
        if kind == "zero":
            return ZERO
        if kind == "polynomial":
            return polynomial(params["coefficients"])
        if kind == "sin":
            return sine(params.get("amplitude", 1.0), params.get("frequency", 1.0))
        if kind == "cos":
            return cosine(params.get("amplitude", 1.0), params.get("frequency", 1.0))
        if kind in ("table", "piecewise_linear"):
            return table(params.get("points") or params["breakpoints"])
        if kind == "spike_train":
            return SpikeTrain(**params).component()
    except KeyError as exc:
        raise ConfigError(f"function kind {kind!r} is missing parameter {exc}") from None
    except TypeError as exc:
        raise ConfigError(f"bad parameters for function kind {kind!r}: {exc}") from None
    raise ConfigError(f"unknown function kind {kind!r}")
