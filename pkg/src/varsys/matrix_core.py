"""Symmetric positive-definite matrices, their spectra and the two norm bounds.

The two assemblers build the 1-D second-difference matrix and the 2-D
five-point Dirichlet Laplacian (block tridiagonal, ``D`` on the diagonal and
``-I_m`` off it).  Spectra come from a cyclic Jacobi eigensolver.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidDimensionError, NumericalError, StructuralError

__all__ = [
    "GridIndexMap",
    "SpdMatrix",
    "assemble_grid_laplacian",
    "assemble_second_difference",
    "format_spectrum",
    "jacobi_eigenvalues",
    "load_matrix",
    "quadratic_form",
    "spectrum",
    "sup_norm_radius",
]

PD_FLOOR = 1e-10
JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-12

GENERAL = "general"
SECOND_DIFFERENCE = "tridiagonal-second-difference"
GRID = "grid-laplacian"


def _round_robin(n):
    """Yield n-1 (n even) rounds of disjoint index pairs covering every pair once."""
    players = list(range(n))
    for _ in range(n - 1):
        half = n // 2
        pairs = [(players[i], players[n - 1 - i]) for i in range(half)]
        yield np.array([min(p) for p in pairs]), np.array([max(p) for p in pairs])
        players = [players[0]] + [players[-1]] + players[1:-1]


def jacobi_eigenvalues(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations inside one round act on disjoint index pairs and can
    be applied together.  Iteration stops when the off-diagonal Frobenius
    norm drops below ``tol`` (absolute, scaled by ``max(1, ||A||_F)``).

    Returns the eigenvalues in ascending order.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    if n == 1:
        return a.diagonal().copy()
    size = n + (n % 2)
    scale = max(1.0, float(np.linalg.norm(a)))
    rounds = []
    for p, q in _round_robin(size):
        keep = q < n  # the dummy player n (odd orders) sits out
        rounds.append((p[keep], q[keep]))
    off = 0.0
    for sweep in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(a.diagonal())))
        if off <= tol * scale:
            return np.sort(a.diagonal())
        for p, q in rounds:
            apq = a[p, q]
            tiny = np.abs(apq) <= 1e-300
            denom = np.where(tiny, 1.0, 2.0 * apq)
            theta = (a[q, q] - a[p, p]) / denom
            big = np.abs(theta) > 1e150
            safe = np.where(big, 1.0, theta)
            t = np.where(safe >= 0, 1.0, -1.0) / (np.abs(safe) + np.sqrt(safe * safe + 1.0))
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
            t = np.where(tiny, 0.0, t)  # no rotation for (numerically) zero entries
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            cc, ss = c[:, None], s[:, None]
            rows_p, rows_q = a[p], a[q]
            a[p] = cc * rows_p - ss * rows_q
            a[q] = ss * rows_p + cc * rows_q
            cols_p, cols_q = a[:, p], a[:, q]
            a[:, p] = cols_p * c - cols_q * s
            a[:, q] = cols_p * s + cols_q * c
            a[p, q] = 0.0
            a[q, p] = 0.0
    raise NumericalError(
        "Jacobi eigensolver did not converge",
        sweeps=max_sweeps,
        off_diagonal_norm=off,
        tolerance=tol * scale,
    )


@dataclass(frozen=True)
class GridIndexMap:
    """Bijection (i, j) -> k = i + m(j-1) between the m x n grid and 1..mn (1-based)."""

    m: int
    n: int

    def forward(self, i, j):
        if not (1 <= i <= self.m and 1 <= j <= self.n):
            raise IndexError(f"grid point ({i}, {j}) outside 1..{self.m} x 1..{self.n}")
        return i + self.m * (j - 1)

    def inverse(self, k):
        if not 1 <= k <= self.m * self.n:
            raise IndexError(f"index {k} outside 1..{self.m * self.n}")
        j, i = divmod(k - 1, self.m)
        return i + 1, j + 1

    def to_grid(self, w):
        """Vector of length mn -> m x n array with entry [i-1, j-1] = w_{v(i,j)}."""
        w = np.asarray(w, dtype=float)
        return w.reshape(self.n, self.m).T.copy()

    def to_vector(self, grid):
        grid = np.asarray(grid, dtype=float)
        return grid.T.reshape(-1).copy()


class SpdMatrix:
    """Dense symmetric matrix with a lazily computed, cached ascending spectrum.

    Symmetry is enforced at construction.  Positive-definiteness is checked on
    demand by :meth:`require_positive_definite` (``lambda_1 > 1e-10``), since
    a user matrix may legitimately be inspected before being rejected.
    """

    def __init__(self, entries, structural_tag=GENERAL, grid_shape=None, matrix_free=False):
        entries = np.array(entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise StructuralError(f"matrix must be square, got shape {entries.shape}")
        if entries.shape[0] == 0:
            raise InvalidDimensionError("matrix order must be at least 1")
        scale = max(1.0, float(np.max(np.abs(entries))))
        if not np.allclose(entries, entries.T, rtol=0.0, atol=1e-12 * scale):
            raise StructuralError("matrix is not symmetric")
        entries = 0.5 * (entries + entries.T)
        entries.setflags(write=False)
        self.entries = entries
        self.structural_tag = structural_tag
        self.grid_shape = grid_shape
        self.matrix_free = matrix_free and grid_shape is not None
        self._spectrum = None
        self._lock = threading.Lock()

    @property
    def order(self):
        return self.entries.shape[0]

    @property
    def spectrum(self):
        if self._spectrum is None:
            with self._lock:
                if self._spectrum is None:
                    values = self._grid_spectrum()
                    if values is None:
                        values = jacobi_eigenvalues(self.entries)
                    values.setflags(write=False)
                    self._spectrum = values
        return self._spectrum

    def _grid_spectrum(self):
        """Grid Laplacians are Kronecker sums I (x) T_m + T_n (x) I of second
        differences, so their eigenvalues are all sums of the factor
        eigenvalues.  The factors are solved by Jacobi too; the shortcut only
        applies when the entries really have this form."""
        if self.structural_tag != GRID or self.grid_shape is None:
            return None
        m, n = self.grid_shape
        t_m = 2.0 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)
        t_n = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
        if not np.array_equal(self.entries, np.kron(np.eye(n), t_m) + np.kron(t_n, np.eye(m))):
            return None
        sums = jacobi_eigenvalues(t_m)[:, None] + jacobi_eigenvalues(t_n)[None, :]
        return np.sort(sums.ravel())

    @property
    def lambda1(self):
        return float(self.spectrum[0])

    @property
    def lambda_max(self):
        return float(self.spectrum[-1])

    @property
    def trace(self):
        return float(np.trace(self.entries))

    @property
    def upper_sum(self):
        """Sum of the strictly upper triangular entries."""
        return float(np.sum(np.triu(self.entries, k=1)))

    @property
    def ones_form(self):
        """1^t A 1, the sum of every entry (= trace + 2 * upper_sum)."""
        return float(np.sum(self.entries))

    def is_positive_definite(self):
        return self.lambda1 > PD_FLOOR

    def require_positive_definite(self):
        if not self.is_positive_definite():
            raise StructuralError(
                f"matrix is not positive-definite: lambda_1 = {self.lambda1:.6g} <= {PD_FLOOR}"
            )
        return self

    def matvec(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape != (self.order,):
            raise InvalidDimensionError(f"vector of length {u.shape} for matrix of order {self.order}")
        if self.matrix_free:
            return _grid_stencil(u, *self.grid_shape)
        return self.entries @ u

    def __repr__(self):
        return f"SpdMatrix(order={self.order}, tag={self.structural_tag!r})"


def _grid_stencil(u, m, n):
    g = u.reshape(n, m).T
    out = 4.0 * g
    out[1:, :] -= g[:-1, :]
    out[:-1, :] -= g[1:, :]
    out[:, 1:] -= g[:, :-1]
    out[:, :-1] -= g[:, 1:]
    return out.T.reshape(-1)


def _check_dim(name, value):
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise InvalidDimensionError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def assemble_second_difference(n):
    """n x n tridiagonal matrix with 2 on the diagonal and -1 beside it."""
    n = _check_dim("n", n)
    a = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    return SpdMatrix(a, structural_tag=SECOND_DIFFERENCE)


def assemble_grid_laplacian(m, n, matrix_free=False):
    """Five-point Dirichlet Laplacian on an m x n interior grid.

    Ordering follows the index map k = i + m(j-1), so column index j selects
    the diagonal block.  Returns the matrix together with its index map.
    """
    m = _check_dim("m", m)
    n = _check_dim("n", n)
    d = 4.0 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)
    off = np.eye(n, k=1) + np.eye(n, k=-1)
    a = np.kron(np.eye(n), d) - np.kron(off, np.eye(m))
    matrix = SpdMatrix(a, structural_tag=GRID, grid_shape=(m, n), matrix_free=matrix_free)
    return matrix, GridIndexMap(m, n)


def _as_matrix(a):
    return a if isinstance(a, SpdMatrix) else SpdMatrix(a)


def spectrum(a):
    """Ascending eigenvalues of ``a`` (an SpdMatrix or a square array)."""
    return [float(x) for x in _as_matrix(a).spectrum]


def quadratic_form(a, u):
    """u^t A u."""
    u = np.asarray(u, dtype=float)
    return float(u @ _as_matrix(a).matvec(u))


def sup_norm_radius(a, r, shift=0.0):
    """Half-width c of a sup-norm box containing the sublevel set {u^t A u < 2r}.

    c = sqrt(2 r / (lambda_1 - shift)).  With ``shift = L`` the box also
    contains {Phi < r} for a perturbed functional with Lipschitz constant L.
    """
    if not r > 0:
        raise ValueError(f"radius level must be positive, got {r}")
    gap = _as_matrix(a).lambda1 - shift
    if not gap > 0:
        raise StructuralError(f"lambda_1 - shift must be positive, got {gap}")
    return math.sqrt(2.0 * r / gap)


def format_spectrum(values):
    """One eigenvalue per line, 17 significant digits."""
    return "".join(f"{float(v):.17g}\n" for v in values)


def matrix_from_document(doc):
    """Build a matrix from a parsed config/document section."""
    tag = doc.get("tag", GENERAL)
    if tag == "grid":
        return assemble_grid_laplacian(doc["m"], doc["n"])[0]
    if tag in ("second_difference", SECOND_DIFFERENCE):
        return assemble_second_difference(doc["n"])
    if "entries" not in doc:
        raise StructuralError("matrix document needs 'entries' or a known 'tag'")
    entries = np.array(doc["entries"], dtype=float)
    if "order" in doc:
        order = _check_dim("order", doc["order"])
        if entries.size != order * order:
            raise InvalidDimensionError(f"expected {order * order} entries, got {entries.size}")
        entries = entries.reshape(order, order)
    return SpdMatrix(entries)


def load_matrix(path):
    """Read a matrix file: JSON document, or whitespace-separated dense rows."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return matrix_from_document(json.loads(text))
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    try:
        entries = np.array([[float(x) for x in row] for row in rows])
    except ValueError as exc:
        raise StructuralError(f"cannot parse dense matrix text: {exc}") from None
    return SpdMatrix(entries)
