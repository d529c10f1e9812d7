"""Energy functional J_lambda = Phi - lambda * Psi of the system A u = lambda f(u) + h(u).

    Phi(u) = u^t A u / 2 - sum_k H_k(u_k)
    Psi(u) = sum_k F_k(u_k)

Critical points of J_lambda are exactly the solutions of the system; the
gradient is A u - lambda f(u) - h(u).
"""

from __future__ import annotations

import math
import threading
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import box_max, interval_constant
from .errors import InvalidDimensionError, StructuralError
from .matrix_core import SpdMatrix
from .nonlinearity import Nonlinearity, Perturbation, check_lipschitz_condition

__all__ = ["CoercivityReport", "EnergyFunctional", "ProblemInstance", "VarphiBound"]


@dataclass
class ProblemInstance:
    """(A, f, h, lambda) with the Lipschitz check recorded at construction."""

    matrix: SpdMatrix
    f: Nonlinearity
    h: Perturbation
    lam: float
    lipschitz: object = field(init=False)

    def __post_init__(self):
        n = self.matrix.order
        if len(self.f) != n or len(self.h) != n:
            raise InvalidDimensionError(
                f"dimension mismatch: order(A) = {n}, |f| = {len(self.f)}, |h| = {len(self.h)}"
            )
        if not self.lam > 0:
            raise StructuralError(f"lambda must be positive, got {self.lam}")
        self.matrix.require_positive_definite()
        self.lipschitz = check_lipschitz_condition(self.h.L, self.matrix.lambda1)

    @property
    def n(self):
        return self.matrix.order

    @property
    def L(self):
        return self.h.L

    @property
    def gap(self):
        """lambda_1 - L."""
        return self.matrix.lambda1 - self.h.L

    @property
    def constant_T(self):
        return interval_constant(self.matrix, self.h.L)

    def with_lambda(self, lam):
        return ProblemInstance(self.matrix, self.f, self.h, lam)


@dataclass(frozen=True)
class CoercivityReport:
    phi: float
    lower_bound: float
    upper_bound: float
    lower_ok: bool
    upper_ok: bool

    @property
    def ok(self):
        return self.lower_ok and self.upper_ok


@dataclass(frozen=True)
class VarphiBound:
    """Upper bound (sum_k max_{|t|<=c} F_k(t)) / r on varphi(r); a bound, not the infimum."""

    r: float
    box_radius: float
    box_max_sum: float
    value: float
    kind: str = "bound"


class EnergyFunctional:
    """Evaluates Phi, Psi, J_lambda and their derivatives for one problem.

    Evaluation counters are diagnostics only; they are guarded by a lock so
    concurrent solver workers may share one instance.
    """

    def __init__(self, problem: ProblemInstance):
        self.problem = problem
        self.counters = Counter()
        self._lock = threading.Lock()

    def _count(self, key):
        with self._lock:
            self.counters[key] += 1

    def _vec(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape != (self.problem.n,):
            raise InvalidDimensionError(f"expected a vector of length {self.problem.n}, got shape {u.shape}")
        return u

    @property
    def lam(self):
        return self.problem.lam

    def phi(self, u):
        u = self._vec(u)
        self._count("phi")
        p = self.problem
        return 0.5 * float(u @ p.matrix.matvec(u)) - float(np.sum(p.h.primitives(u)))

    def psi(self, u):
        u = self._vec(u)
        self._count("psi")
        return float(np.sum(self.problem.f.primitives(u)))

    def j_lambda(self, u):
        return self.phi(u) - self.lam * self.psi(u)

    def phi_gradient(self, u):
        u = self._vec(u)
        p = self.problem
        return p.matrix.matvec(u) - p.h.values(u)

    def gradient(self, u):
        """A u - lambda f(u) - h(u); zero exactly at solutions of the system."""
        u = self._vec(u)
        self._count("gradient")
        p = self.problem
        return p.matrix.matvec(u) - self.lam * p.f.values(u) - p.h.values(u)

    def residual(self, u):
        return float(np.linalg.norm(self.gradient(u)))

    def phi_hessian(self, u):
        u = self._vec(u)
        p = self.problem
        return p.matrix.entries - np.diag(p.h.slopes(u))

    def hessian(self, u):
        """A - lambda diag(f'(u)) - diag(h'(u))."""
        u = self._vec(u)
        self._count("hessian")
        p = self.problem
        return p.matrix.entries - np.diag(self.lam * p.f.slopes(u) + p.h.slopes(u))

    def coercivity_certificate(self, u, tol=1e-9):
        """Check ((lambda_1 - L)/2)|u|^2 <= Phi(u) <= u^t A u / 2 + (L/2)|u|^2."""
        u = self._vec(u)
        p = self.problem
        sq = float(u @ u)
        quad = float(u @ p.matrix.matvec(u))
        value = self.phi(u)
        lower = 0.5 * p.gap * sq
        upper = 0.5 * quad + 0.5 * p.L * sq
        slack = tol * max(1.0, abs(value))
        return CoercivityReport(value, lower, upper, value >= lower - slack, value <= upper + slack)

    def varphi_upper_bound(self, r):
        """Bound on varphi(r) from u = 0 and the sup-norm box of {Phi < r}."""
        if not r > 0:
            raise ValueError(f"r must be positive, got {r}")
        p = self.problem
        if not p.gap > 0:
            raise StructuralError("varphi bound needs L < lambda_1")
        c = math.sqrt(2.0 * r / p.gap)
        unique = {}
        for comp in p.f.components:
            if id(comp) not in unique:
                unique[id(comp)] = box_max(comp, c)
        total = sum(unique[id(comp)] for comp in p.f.components)
        return VarphiBound(r=r, box_radius=c, box_max_sum=total, value=total / r)
