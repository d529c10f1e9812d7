"""Numerical search for multiple solutions of A u = lambda f(u) + h(u).

``local_minimize`` drives the gradient of J_lambda to zero (Newton steps on
the gradient, safeguarded by backtracking); ``minimize_on_sublevel`` finds a
minimizer of J_lambda inside {Phi < r} with a logarithmic barrier;
``cascade`` walks a schedule of levels r_m and keeps one interior minimizer
per level, producing a finite prefix of a solution sequence.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .asymptotics import lambda_interval, oscillation_condition
from .errors import HypothesisError, StructuralError

__all__ = [
    "CascadeResult",
    "NonConvergence",
    "SolveConfig",
    "SolveResult",
    "SolutionRecord",
    "SublevelResult",
    "WitnessReport",
    "cascade",
    "check_hypotheses",
    "default_schedule",
    "local_minimize",
    "minimize_on_sublevel",
    "multistart_solve",
    "unboundedness_witness",
]

log = logging.getLogger(__name__)

ARMIJO = 1e-4
BACKTRACK = 0.5
MAX_BACKTRACKS = 60
DEFAULT_MU = (1e-2, 1e-4, 1e-6, 1e-8, 1e-10)
DIVERGENCE_FACTOR = 1e12  # |u| beyond this multiple of max(1, |start|) counts as divergence
STAGNATION_WINDOW = 2000  # iterations without a STAGNATION_GAIN relative drop of |grad|
STAGNATION_GAIN = 1e-3
DECREMENT_TOL = 1e-13  # squared Newton decrement, relative to |barrier value|


@dataclass
class SolveConfig:
    residual_tol: float = 1e-8
    max_iters: int = 100_000
    dedupe_radius: float = 1e-6
    dedupe_atol: float = 1e-12
    starts: Optional[list] = None
    n_random_starts: int = 0
    start_radius: Optional[float] = None
    radius_schedule: Optional[list] = None
    schedule_ratio: float = 10.0
    schedule_count: int = 6
    barrier_mu: tuple = DEFAULT_MU
    interior_margin: float = 1e-6
    seed: int = 0
    workers: int = 1
    override_hypotheses: bool = False

    def __post_init__(self):
        if not self.residual_tol > 0:
            raise StructuralError("residual_tol must be positive")
        if self.max_iters < 1:
            raise StructuralError("max_iters must be at least 1")
        if not self.dedupe_radius > 0:
            raise StructuralError("dedupe_radius must be positive")


@dataclass
class SolutionRecord:
    u: np.ndarray
    phi: float
    j_value: float
    residual: float
    norm2: float
    norm_inf: float
    origin: str = "multistart"
    min_hessian_eig: float = math.nan
    iterations: int = 0

    @property
    def stationary_type(self):
        if math.isnan(self.min_hessian_eig):
            return "unknown"
        return "minimum" if self.min_hessian_eig > 0 else "saddle"

    def as_row(self):
        return [self.phi, self.j_value, self.residual, self.norm2, self.norm_inf, *map(float, self.u)]


@dataclass
class NonConvergence:
    last_iterate: np.ndarray
    gradient_norm: float
    iterations: int
    reason: str
    trace: list = field(default_factory=list)


def _fd_min_eig(J, u):
    """Smallest eigenvalue of a central-difference Hessian (diagnostic)."""
    n = len(u)
    hess = np.empty((n, n))
    for i in range(n):
        step = 1e-6 * max(1.0, abs(u[i]))
        e = np.zeros(n)
        e[i] = step
        hess[:, i] = (J.gradient(u + e) - J.gradient(u - e)) / (2.0 * step)
    hess = 0.5 * (hess + hess.T)
    return float(np.linalg.eigvalsh(hess)[0])


def make_record(J, u, origin="multistart", iterations=0):
    u = np.array(u, dtype=float)
    phi = J.phi(u)
    return SolutionRecord(
        u=u,
        phi=phi,
        j_value=phi - J.lam * J.psi(u),
        residual=J.residual(u),
        norm2=float(np.linalg.norm(u)),
        norm_inf=float(np.max(np.abs(u))),
        origin=origin,
        min_hessian_eig=_fd_min_eig(J, u),
        iterations=iterations,
    )


def _newton_direction(hess, g):
    try:
        d = np.linalg.solve(hess, -g)
    except np.linalg.LinAlgError:
        return None
    return d if np.all(np.isfinite(d)) else None


def local_minimize(J, start, cfg: SolveConfig, origin="multistart"):
    """Drive |A u - lambda f(u) - h(u)| below ``cfg.residual_tol`` from ``start``.

    Each iteration tries the Newton step for the gradient field (Jacobian
    A - lambda diag f' - diag h') with backtracking on 0.5 |grad|^2; when the
    Jacobian is singular or the backtracking fails, a steepest-descent step
    on J_lambda with Armijo backtracking is taken instead.  Newton steps may
    land on saddles; those are still solutions and are tagged as such.

    Returns a :class:`SolutionRecord` or a :class:`NonConvergence`.
    """
    u = np.array(start, dtype=float)
    bound = DIVERGENCE_FACTOR * max(1.0, float(np.linalg.norm(u)))
    trace = []
    g = J.gradient(u)
    gn = float(np.linalg.norm(g))
    best, best_it = gn, 0
    for it in range(cfg.max_iters):
        if it % 10 == 0:
            trace.append(gn)
        if gn <= cfg.residual_tol:
            return make_record(J, u, origin, iterations=it)
        merit = 0.5 * gn * gn
        moved = False
        d = _newton_direction(J.hessian(u), g)
        if d is not None:
            alpha = 1.0
            for _ in range(MAX_BACKTRACKS):
                trial = u + alpha * d
                g_trial = J.gradient(trial)
                m_trial = 0.5 * float(g_trial @ g_trial)
                if np.isfinite(m_trial) and m_trial <= (1.0 - 2.0 * ARMIJO * alpha) * merit:
                    u, g, moved = trial, g_trial, True
                    break
                alpha *= BACKTRACK
        if not moved:
            j0 = J.j_lambda(u)
            alpha = 1.0 / max(1.0, gn)
            for _ in range(MAX_BACKTRACKS):
                trial = u - alpha * g
                if J.j_lambda(trial) <= j0 - ARMIJO * alpha * gn * gn:
                    u, moved = trial, True
                    g = J.gradient(u)
                    break
                alpha *= BACKTRACK
        if not moved:
            trace.append(gn)
            return NonConvergence(u, gn, it, "line search stalled", trace)
        gn = float(np.linalg.norm(g))
        if not np.isfinite(gn) or float(np.linalg.norm(u)) > bound:
            trace.append(gn)
            return NonConvergence(u, gn, it + 1, "iterates diverged (J unbounded below along the path?)", trace)
        if gn < (1.0 - STAGNATION_GAIN) * best:
            best, best_it = gn, it
        elif it - best_it > STAGNATION_WINDOW:
            trace.append(gn)
            return NonConvergence(u, gn, it + 1, "stagnated (no residual progress)", trace)
    trace.append(gn)
    if gn <= cfg.residual_tol:
        return make_record(J, u, origin, iterations=cfg.max_iters)
    return NonConvergence(u, gn, cfg.max_iters, "iteration cap reached", trace)


@dataclass
class SublevelResult:
    status: str  # "interior", "boundary" or "failed"
    r: float
    u: np.ndarray
    phi: float
    record: Optional[SolutionRecord] = None
    detail: str = ""


def _pull_inside(J, u, r, margin):
    """Scale u toward 0 until Phi(u) < (1 - margin) r (Phi(0) = 0 < r)."""
    target = (1.0 - margin) * r
    if J.phi(u) < target:
        return u
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if J.phi(mid * u) < target:
            lo = mid
        else:
            hi = mid
    return lo * u


def _barrier_minimize(J, u, r, mu, tol, max_iters):
    """Modified-Newton descent on J(u) - mu log(r - Phi(u)) from a strictly feasible u."""

    def value(x):
        slack = r - J.phi(x)
        if not slack > 0:
            return math.inf
        return J.j_lambda(x) - mu * math.log(slack)

    current = value(u)
    for _ in range(max_iters):
        slack = r - J.phi(u)
        gphi = J.phi_gradient(u)
        grad = J.gradient(u) + (mu / slack) * gphi
        gn = float(np.linalg.norm(grad))
        if gn <= tol:
            break
        hess = J.hessian(u) + (mu / slack) * J.phi_hessian(u) + (mu / slack**2) * np.outer(gphi, gphi)
        hess = 0.5 * (hess + hess.T)
        scale = max(1.0, float(np.max(np.abs(np.diag(hess)))))
        shift = 0.0
        d = None
        for _ in range(30):
            try:
                chol = np.linalg.cholesky(hess + shift * np.eye(len(u)))
            except np.linalg.LinAlgError:
                shift = max(2.0 * shift, 1e-10 * scale) * 10.0
                continue
            d = -np.linalg.solve(chol.T, np.linalg.solve(chol, grad))
            break
        if d is None or not np.all(np.isfinite(d)):
            d = -grad / max(1.0, gn)
        slope = float(grad @ d)
        if slope >= 0:
            d, slope = -grad, -gn * gn
        if -slope <= DECREMENT_TOL * max(abs(current), mu):
            break
        alpha = 1.0
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            trial = u + alpha * d
            v = value(trial)
            if v <= current + ARMIJO * alpha * slope and v < current:
                u, current, accepted = trial, v, True
                break
            alpha *= BACKTRACK
        if not accepted or alpha * float(np.linalg.norm(d)) <= 1e-15 * max(1.0, float(np.linalg.norm(u))):
            break
    return u


def minimize_on_sublevel(J, r, cfg: SolveConfig, start=None, origin=None):
    """Minimize J_lambda on the open sublevel set {Phi < r}.

    A logarithmic barrier -mu * r * log(r - Phi(u)) is minimized for each
    mu in ``cfg.barrier_mu`` (decreasing).  If the end point keeps a margin
    r - Phi >= interior_margin * r, it is polished by :func:`local_minimize`
    into a certified solution (status ``"interior"``); otherwise the
    constrained minimizer sits on the boundary and is not a solution.
    """
    if not r > 0:
        raise ValueError(f"sublevel radius must be positive, got {r}")
    n = J.problem.n
    u = np.zeros(n) if start is None else np.array(start, dtype=float)
    margin = cfg.interior_margin
    u = _pull_inside(J, u, r, margin)
    inner_iters = min(cfg.max_iters, 500)
    for mu in cfg.barrier_mu:
        u = _barrier_minimize(J, u, r, mu * r, cfg.residual_tol, inner_iters)
    phi = J.phi(u)
    if r - phi < margin * r:
        return SublevelResult("boundary", r, u, phi, detail="barrier active at the end")
    polished = local_minimize(J, u, cfg, origin=origin or f"cascade(r={r:.6g})")
    if isinstance(polished, NonConvergence):
        return SublevelResult("failed", r, polished.last_iterate, J.phi(polished.last_iterate),
                              detail=polished.reason)
    if r - polished.phi < margin * r:
        return SublevelResult("boundary", r, polished.u, polished.phi, detail="polished point left the set")
    return SublevelResult("interior", r, polished.u, polished.phi, record=polished)


def _accuracy(rec):
    """Error bound residual / |smallest Hessian eigenvalue| of a record's location."""
    eig = abs(rec.min_hessian_eig)
    if math.isnan(eig) or eig < 1e-12:
        return 0.0
    return rec.residual / eig


def _distinct(a, b, cfg):
    """Records differ beyond dedupe_radius (relative) plus their location accuracy."""
    dist = float(np.linalg.norm(a.u - b.u))
    scale = max(float(np.linalg.norm(a.u)), float(np.linalg.norm(b.u)))
    return dist > cfg.dedupe_radius * scale + cfg.dedupe_atol + _accuracy(a) + _accuracy(b)


def dedupe(records, cfg):
    kept = []
    for rec in records:
        if all(_distinct(rec, k, cfg) for k in kept):
            kept.append(rec)
    return kept


def check_hypotheses(J, cfg, profile=None, regime="infinity"):
    """Raise HypothesisError on a failed hypothesis unless overridden; return warnings."""
    p = J.problem
    problems = []
    if not p.lipschitz.passed:
        problems.append(f"L = {p.L:.17g} is not below lambda_1 = {p.matrix.lambda1:.17g}")
    if profile is not None:
        verdict = oscillation_condition(profile, p.matrix, p.L, regime)
        if not verdict.passed:
            problems.append(verdict.describe())
        interval = lambda_interval(profile, p.matrix, p.L, regime)
        if p.lam not in interval:
            problems.append(f"lambda = {p.lam:.17g} outside ]{interval.lower:.17g}, {interval.upper:.17g}[")
    if problems and not cfg.override_hypotheses:
        raise HypothesisError("; ".join(problems))
    for msg in problems:
        warnings.warn(f"proceeding without guarantee: {msg}", stacklevel=3)
    return problems


@dataclass
class SolveResult:
    records: list
    failures: list
    overridden: list = field(default_factory=list)

    @property
    def distinct_count(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def _map(func, items, workers):
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _random_starts(rng, count, n, radius):
    return [rng.uniform(-radius, radius, size=n) for _ in range(count)]


def multistart_solve(J, cfg: SolveConfig):
    """Run :func:`local_minimize` from every start, dedupe, sort by Phi."""
    overridden = check_hypotheses(J, cfg)
    n = J.problem.n
    starts = [np.asarray(s, dtype=float).reshape(n) for s in (cfg.starts or [])]
    if cfg.n_random_starts:
        radius = cfg.start_radius if cfg.start_radius is not None else 10.0
        starts += _random_starts(np.random.default_rng(cfg.seed), cfg.n_random_starts, n, radius)
    if not starts:
        raise StructuralError("multistart needs at least one start")
    outcomes = _map(lambda s: local_minimize(J, s, cfg), starts, cfg.workers)
    records = [o for o in outcomes if isinstance(o, SolutionRecord)]
    failures = [o for o in outcomes if isinstance(o, NonConvergence)]
    kept = sorted(dedupe(records, cfg), key=lambda rec: rec.phi)
    return SolveResult(kept, failures, overridden)


def default_schedule(J, cfg, regime="infinity", plateau_ends=None):
    """Levels r_m: explicit, from witness plateau ends, or geometric.

    With witness plateau ends c_m the levels are ((lambda_1 - L)/2) c_m^2.
    Otherwise a geometric schedule with ratio ``cfg.schedule_ratio`` starting
    at 1 (its inverse toward zero).
    """
    if cfg.radius_schedule is not None:
        sched = [float(r) for r in cfg.radius_schedule]
    elif plateau_ends is not None:
        half_gap = 0.5 * J.problem.gap
        sched = [half_gap * c * c for c in plateau_ends]
    else:
        ratio = cfg.schedule_ratio if regime == "infinity" else 1.0 / cfg.schedule_ratio
        sched = [ratio**i for i in range(cfg.schedule_count)]
    diffs = np.diff(sched)
    if any(r <= 0 for r in sched):
        raise StructuralError("schedule levels must be positive")
    if regime == "infinity" and not np.all(diffs > 0):
        raise StructuralError("infinity-regime schedule must be strictly increasing")
    if regime == "zero" and not np.all(diffs < 0):
        raise StructuralError("zero-regime schedule must be strictly decreasing")
    return sched


@dataclass
class CascadeResult:
    records: list
    levels: list  # per level: list of SublevelResult
    regime: str
    overridden: list = field(default_factory=list)

    @property
    def evidence(self):
        if self.records:
            return f"{len(self.records)} distinct solutions (finite prefix)"
        return ("no multiplicity evidence: either J_lambda (or Phi) has a global minimum "
                "that ends the sequence, or the tolerances are too tight")

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def cascade(J, cfg: SolveConfig, regime="infinity", profile=None, witness_peaks=None, plateau_ends=None):
    """Harvest one interior minimizer of J_lambda per sublevel set {Phi < r_m}.

    Starts at each level: the previous kept solution, the constant vectors
    b * 1 for witness peaks b, and ``cfg.n_random_starts`` uniform points of
    the sup-norm box of radius sqrt(2 r_m / (lambda_1 - L)).  Among interior
    candidates the lowest J_lambda is kept provided it is distinct from all
    earlier records and continues the monotone chain: Phi strictly increasing
    (infinity) or sup-norm strictly decreasing and nontrivial (zero).
    """
    overridden = check_hypotheses(J, cfg, profile, regime)
    p = J.problem
    schedule = default_schedule(J, cfg, regime, plateau_ends)
    n = p.n
    peaks = list(witness_peaks or [])
    ones = np.ones(n)
    kept = []
    levels = []
    for idx, r in enumerate(schedule):
        rng = np.random.default_rng([cfg.seed, idx])
        radius = math.sqrt(2.0 * r / p.gap) if p.gap > 0 else math.sqrt(2.0 * r)
        starts = []
        if kept:
            starts.append(kept[-1].u)
        starts += [b * ones for b in peaks if J.phi(b * ones) < r]
        starts += list(cfg.starts or [])
        starts += _random_starts(rng, cfg.n_random_starts, n, radius)
        if not starts:
            starts = [np.zeros(n)]
        origin = f"cascade(m={idx + 1}, r={r:.6g})"
        results = _map(lambda s: minimize_on_sublevel(J, r, cfg, start=s, origin=origin), starts, cfg.workers)
        levels.append(results)
        candidates = sorted((res.record for res in results if res.status == "interior"),
                            key=lambda rec: rec.j_value)
        for rec in candidates:
            if not all(_distinct(rec, k, cfg) for k in kept):
                continue
            if regime == "infinity":
                if kept and not rec.phi > kept[-1].phi:
                    continue
            else:
                if rec.norm2 <= cfg.residual_tol:
                    continue
                if kept and not rec.norm_inf < kept[-1].norm_inf:
                    continue
            kept.append(rec)
            break
        log.info("level %d r=%.6g kept=%d", idx + 1, r, len(kept))
    return CascadeResult(kept, levels, regime, overridden)


@dataclass
class WitnessReport:
    peaks: list
    values: list  # J_lambda(b * 1)
    bounds: list  # (T/2) b^2 - lambda sum_k F_k(b)
    inequality_holds: list
    decreasing: bool
    negative_from: Optional[int]  # 1-based index after which all values are negative

    @property
    def verdict(self):
        if self.decreasing and self.negative_from is not None:
            return "unbounded-below evidence"
        return "bounded-below evidence"


def unboundedness_witness(J, peaks, tol=1e-9):
    """Evaluate J_lambda along constant vectors b_m * 1 and check the bound

        J_lambda(b 1) <= (T/2) b^2 - lambda sum_k F_k(b),  T = 1^t A 1 + n L.
    """
    p = J.problem
    ones = np.ones(p.n)
    half_t = 0.5 * p.constant_T
    values, bounds, holds = [], [], []
    for b in peaks:
        s = b * ones
        val = J.j_lambda(s)
        bound = half_t * b * b - p.lam * J.psi(s)
        values.append(val)
        bounds.append(bound)
        holds.append(val <= bound + tol * max(1.0, abs(bound)))
    decreasing = bool(np.all(np.diff(values) < 0)) if len(values) > 1 else False
    negative_from = None
    for i in range(len(values)):
        if all(v < 0 for v in values[i:]):
            negative_from = i + 1
            break
    return WitnessReport(list(peaks), values, bounds, holds, decreasing, negative_from)
