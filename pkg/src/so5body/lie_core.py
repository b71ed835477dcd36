"""Core so(n) algebra for the free rigid body.

Generic-n pieces (momentum/velocity map, equations of motion, Hamiltonian,
inner product) work on any ``SkewMatrix``.  The coordinate chart, basis
E1..E10, bracket table and Lie-Poisson tensor are so(5) only.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, InertiaError


class SkewMatrix:
    """Real antisymmetric n x n matrix stored as its strict upper triangle.

    Entries are kept in row-major order of the strict upper triangle, so a
    SkewMatrix cannot be non-antisymmetric.  Instances are immutable.
    """

    __slots__ = ("n", "_upper")

    def __init__(self, n: int, upper):
        n = int(n)
        if n < 3:
            raise DimensionError(f"n must be >= 3, got {n}")
        upper = np.array(upper, dtype=float).reshape(-1)
        if upper.size != n * (n - 1) // 2:
            raise DimensionError(
                f"so({n}) needs {n * (n - 1) // 2} upper entries, got {upper.size}")
        upper.flags.writeable = False
        self.n = n
        self._upper = upper

    @classmethod
    def zeros(cls, n):
        return cls(n, np.zeros(n * (n - 1) // 2))

    @classmethod
    def from_full(cls, A):
        """Read the strict upper triangle of a square array; the rest is ignored."""
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {A.shape}")
        iu = np.triu_indices(A.shape[0], 1)
        return cls(A.shape[0], A[iu])

    @property
    def upper(self) -> np.ndarray:
        return self._upper

    def full(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n, 1)
        A[iu] = self._upper
        return A - A.T

    def norm(self) -> float:
        """Norm induced by <X, Y> = -Tr(XY)/2, i.e. the 2-norm of the upper entries."""
        return float(np.linalg.norm(self._upper))

    def __getitem__(self, ij):
        i, j = ij
        if i == j:
            return 0.0
        if i > j:
            return -self[j, i]
        n = self.n
        return float(self._upper[i * n - i * (i + 1) // 2 + (j - i - 1)])

    def _check(self, other):
        if not isinstance(other, SkewMatrix):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError(f"so({self.n}) vs so({other.n})")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SkewMatrix(self.n, self._upper + other._upper)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SkewMatrix(self.n, self._upper - other._upper)

    def __neg__(self):
        return SkewMatrix(self.n, -self._upper)

    def __mul__(self, s):
        if not isinstance(s, numbers.Real):
            return NotImplemented
        return SkewMatrix(self.n, float(s) * self._upper)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return SkewMatrix(self.n, self._upper / float(s))

    def __eq__(self, other):
        if not isinstance(other, SkewMatrix):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._upper, other._upper)

    def __hash__(self):
        return hash((self.n, self._upper.tobytes()))

    def __repr__(self):
        return f"SkewMatrix(n={self.n}, upper={self._upper.tolist()})"

    def to_json(self) -> dict:
        return {"n": self.n, "upper": self._upper.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "SkewMatrix":
        return cls(data["n"], data["upper"])


@dataclass(frozen=True)
class InertiaSpec:
    """Diagonal inertia parameters lambda_1..lambda_n of J.

    ``lambdas`` keeps the caller's number types, so integer or Fraction
    input flows through exact closed-form evaluations untouched.
    """

    lambdas: tuple
    array: np.ndarray = field(init=False, repr=False, compare=False)
    sums: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lams = tuple(self.lambdas)
        if len(lams) < 2:
            raise InertiaError("need at least two inertia parameters")
        for v in lams:
            if not isinstance(v, numbers.Real):
                raise InertiaError(f"inertia parameters must be real, got {v!r}")
        arr = np.array([float(v) for v in lams])
        if not np.all(np.isfinite(arr)):
            raise InertiaError("inertia parameters must be finite")
        n = arr.size
        sums = arr[:, None] + arr[None, :]
        for i in range(n):
            for j in range(i + 1, n):
                if not sums[i, j] > 0:
                    raise InertiaError(
                        f"non-generic body: lambda_{i + 1} + lambda_{j + 1} = {sums[i, j]:g} <= 0")
                if arr[i] == arr[j]:
                    raise InertiaError(f"repeated inertia parameter lambda_{i + 1} = lambda_{j + 1}")
        np.fill_diagonal(sums, 1.0)
        arr.flags.writeable = False
        sums.flags.writeable = False
        object.__setattr__(self, "lambdas", lams)
        object.__setattr__(self, "array", arr)
        object.__setattr__(self, "sums", sums)

    @property
    def n(self) -> int:
        return len(self.lambdas)

    def is_ordered(self) -> bool:
        return bool(np.all(np.diff(self.array) < 0))

    def require_ordered(self):
        """Reject unless lambda_1 > lambda_2 > ... > lambda_n (never re-sorted)."""
        if not self.is_ordered():
            raise InertiaError(
                f"analysis requires lambda_1 > ... > lambda_{self.n}, got {self.lambdas}")
        return self

    def require_dim(self, n):
        if self.n != n:
            raise DimensionError(f"inertia has {self.n} parameters, state is so({n})")
        return self


# ---------------------------------------------------------------------------
# so(5) coordinate chart
# ---------------------------------------------------------------------------

COORD_NAMES = ("x1", "x2", "x3", "y1", "y2", "y3", "z1", "z2", "z3", "z4")


class Coordinates10(NamedTuple):
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0
    y1: float = 0.0
    y2: float = 0.0
    y3: float = 0.0
    z1: float = 0.0
    z2: float = 0.0
    z3: float = 0.0
    z4: float = 0.0


# (row, col) of the upper entry carrying each coordinate, 0-based, and its sign.
COORD_ENTRIES = (
    ((1, 2), -1), ((0, 2), 1), ((0, 1), -1),
    ((0, 3), 1), ((1, 3), 1), ((2, 3), 1),
    ((0, 4), 1), ((1, 4), 1), ((2, 4), 1), ((3, 4), 1),
)

_UPPER5 = list(zip(*np.triu_indices(5, 1)))
# upper[_PERM[k]] = _SIGN[k] * coord[k]
_PERM = np.array([_UPPER5.index(ij) for ij, _ in COORD_ENTRIES])
_SIGN = np.array([s for _, s in COORD_ENTRIES], dtype=float)
_INV_PERM = np.argsort(_PERM)


def coords_to_matrix(c) -> SkewMatrix:
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.size != 10:
        raise DimensionError(f"so(5) has 10 coordinates, got {c.size}")
    upper = np.empty(10)
    upper[_PERM] = _SIGN * c
    return SkewMatrix(5, upper)


def matrix_to_coords(M: SkewMatrix) -> Coordinates10:
    return Coordinates10(*as_coords(M).tolist())


def as_coords(M) -> np.ndarray:
    """Coordinate vector (x1..z4) of an so(5) element or of a raw coordinate sequence."""
    if isinstance(M, SkewMatrix):
        if M.n != 5:
            raise DimensionError(f"coordinates are defined on so(5), got so({M.n})")
        return _SIGN * M.upper[_PERM]
    c = np.asarray(M, dtype=float).reshape(-1)
    if c.size != 10:
        raise DimensionError(f"so(5) has 10 coordinates, got {c.size}")
    return c


def coords_to_full(c) -> np.ndarray:
    """Full 5x5 array(s) from coordinate vector(s) with shape (..., 10)."""
    c = np.asarray(c, dtype=float)
    upper = np.empty(c.shape)
    upper[..., _PERM] = _SIGN * c
    A = np.zeros(c.shape[:-1] + (5, 5))
    iu = np.triu_indices(5, 1)
    A[(...,) + iu] = upper
    return A - np.swapaxes(A, -1, -2)


def full_to_coords(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    iu = np.triu_indices(5, 1)
    return _SIGN * A[(...,) + iu][..., _PERM]


def basis(i: int) -> SkewMatrix:
    """Basis element E_i, 1 <= i <= 10; E_i is the i-th unit coordinate."""
    if not 1 <= i <= 10:
        raise IndexError(f"basis index must be in 1..10, got {i}")
    e = np.zeros(10)
    e[i - 1] = 1.0
    return coords_to_matrix(e)


BASIS = tuple(basis(i) for i in range(1, 11))

# BRACKET_TABLE[i-1][j-1] = +-k encodes [E_i, E_j] = +-E_k (0 for zero).
BRACKET_TABLE = (
    (0, 3, -2, 0, 6, -5, 0, 9, -8, 0),
    (-3, 0, 1, -6, 0, 4, -9, 0, 7, 0),
    (2, -1, 0, 5, -4, 0, 8, -7, 0, 0),
    (0, 6, -5, 0, 3, -2, -10, 0, 0, 7),
    (-6, 0, 4, -3, 0, 1, 0, -10, 0, 8),
    (5, -4, 0, 2, -1, 0, 0, 0, -10, 9),
    (0, 9, -8, 10, 0, 0, 0, 3, -2, -4),
    (-9, 0, 7, 0, 10, 0, -3, 0, 1, -5),
    (8, -7, 0, 0, 0, 10, 2, -1, 0, -6),
    (0, 0, 0, -7, -8, -9, 4, 5, 6, 0),
)


def bracket(X: SkewMatrix, Y: SkewMatrix) -> SkewMatrix:
    """Matrix commutator XY - YX."""
    if X.n != Y.n:
        raise DimensionError(f"so({X.n}) vs so({Y.n})")
    A, B = X.full(), Y.full()
    return SkewMatrix.from_full(A @ B - B @ A)


# ---------------------------------------------------------------------------
# Dynamics on so(n)
# ---------------------------------------------------------------------------

def _check_pair(M: SkewMatrix, J: InertiaSpec):
    if M.n != J.n:
        raise DimensionError(f"state is so({M.n}) but inertia has {J.n} parameters")


def omega_full(A, J: InertiaSpec) -> np.ndarray:
    """Omega with omega_ij = m_ij / (lambda_i + lambda_j), on full array(s)."""
    return A / J.sums


def omega_from_momentum(M: SkewMatrix, J: InertiaSpec) -> SkewMatrix:
    _check_pair(M, J)
    iu = np.triu_indices(M.n, 1)
    return SkewMatrix(M.n, M.upper / J.sums[iu])


def momentum_from_omega(W: SkewMatrix, J: InertiaSpec) -> SkewMatrix:
    """M = Omega J + J Omega."""
    _check_pair(W, J)
    A = W.full()
    D = np.diag(J.array)
    return SkewMatrix.from_full(A @ D + D @ A)


def rhs_full(A, J: InertiaSpec) -> np.ndarray:
    """[M, Omega] on full array(s) of shape (..., n, n)."""
    W = A / J.sums
    return A @ W - W @ A


def rigid_body_rhs(M: SkewMatrix, J: InertiaSpec) -> SkewMatrix:
    """Right-hand side of dM/dt = [M, Omega]."""
    _check_pair(M, J)
    return SkewMatrix.from_full(rhs_full(M.full(), J))


def rhs_coords(c, J: InertiaSpec) -> np.ndarray:
    """The ten component equations of the so(5) system, written out per coordinate."""
    J.require_dim(5)
    x1, x2, x3, y1, y2, y3, z1, z2, z3, z4 = as_coords(c)
    l1, l2, l3, l4, l5 = J.array
    s = lambda i, j: J.array[i - 1] + J.array[j - 1]  # noqa: E731
    return np.array([
        (l2 - l3) * (y2 * y3 / (s(2, 4) * s(3, 4)) - x2 * x3 / (s(1, 2) * s(1, 3))
                     + z2 * z3 / (s(2, 5) * s(3, 5))),
        (l3 - l1) * (y1 * y3 / (s(1, 4) * s(3, 4)) - x1 * x3 / (s(1, 2) * s(2, 3))
                     + z1 * z3 / (s(1, 5) * s(3, 5))),
        (l1 - l2) * (y1 * y2 / (s(1, 4) * s(2, 4)) - x1 * x2 / (s(2, 3) * s(1, 3))
                     + z1 * z2 / (s(1, 5) * s(2, 5))),
        (l1 - l4) * (x2 * y3 / (s(1, 3) * s(3, 4)) - x3 * y2 / (s(1, 2) * s(2, 4))
                     - z1 * z4 / (s(1, 5) * s(4, 5))),
        (l2 - l4) * (x3 * y1 / (s(1, 2) * s(1, 4)) - x1 * y3 / (s(2, 3) * s(3, 4))
                     - z2 * z4 / (s(2, 5) * s(4, 5))),
        (l3 - l4) * (x1 * y2 / (s(2, 3) * s(2, 4)) - x2 * y1 / (s(1, 3) * s(1, 4))
                     - z3 * z4 / (s(3, 5) * s(4, 5))),
        (l1 - l5) * (x2 * z3 / (s(1, 3) * s(3, 5)) - x3 * z2 / (s(1, 2) * s(2, 5))
                     + y1 * z4 / (s(1, 4) * s(4, 5))),
        (l2 - l5) * (x3 * z1 / (s(1, 2) * s(1, 5)) - x1 * z3 / (s(2, 3) * s(3, 5))
                     + y2 * z4 / (s(2, 4) * s(4, 5))),
        (l3 - l5) * (x1 * z2 / (s(2, 3) * s(2, 5)) - x2 * z1 / (s(1, 3) * s(1, 5))
                     + y3 * z4 / (s(3, 4) * s(4, 5))),
        (l4 - l5) * (-y1 * z1 / (s(1, 4) * s(1, 5)) - y2 * z2 / (s(2, 4) * s(2, 5))
                     - y3 * z3 / (s(3, 4) * s(3, 5))),
    ])


_BASIS_FULL = np.eye(10)


def rhs_jacobian_coords(c, J: InertiaSpec) -> np.ndarray:
    """Exact Jacobian of the so(5) vector field in coordinates.

    The field is quadratic, so column i is [E_i, Omega] + [M, Omega(E_i)].
    """
    J.require_dim(5)
    A = coords_to_full(as_coords(c))
    E = coords_to_full(_BASIS_FULL)
    W = A / J.sums
    WE = E / J.sums
    cols = E @ W - W @ E + A @ WE - WE @ A
    return full_to_coords(cols).T


def hamiltonian(M: SkewMatrix, J: InertiaSpec) -> float:
    """H = 1/2 sum_{i<j} m_ij^2 / (lambda_i + lambda_j)."""
    _check_pair(M, J)
    iu = np.triu_indices(M.n, 1)
    return 0.5 * float(np.sum(M.upper ** 2 / J.sums[iu]))


def hamiltonian_trace(M: SkewMatrix, J: InertiaSpec) -> float:
    """H = -Tr(M Omega)/4."""
    _check_pair(M, J)
    A = M.full()
    return -0.25 * float(np.trace(A @ omega_full(A, J)))


def coordinate_weights(J: InertiaSpec) -> np.ndarray:
    """1/(lambda_i + lambda_j) for the pair carried by each so(5) coordinate."""
    J.require_dim(5)
    return np.array([1.0 / J.sums[ij] for ij, _ in COORD_ENTRIES])


def hamiltonian_coords(c, J: InertiaSpec) -> float:
    c = as_coords(c)
    return 0.5 * float(np.sum(coordinate_weights(J) * c ** 2))


def inner_product(X: SkewMatrix, Y: SkewMatrix) -> float:
    """Ad-invariant inner product -Tr(XY)/2."""
    if X.n != Y.n:
        raise DimensionError(f"so({X.n}) vs so({Y.n})")
    return -0.5 * float(np.trace(X.full() @ Y.full()))


# ---------------------------------------------------------------------------
# Lie-Poisson tensor and gradients (so(5) coordinates)
# ---------------------------------------------------------------------------

def poisson_tensor(c) -> np.ndarray:
    x1, x2, x3, y1, y2, y3, z1, z2, z3, z4 = as_coords(c)
    return np.array([
        [0, -x3, x2, 0, -y3, y2, 0, -z3, z2, 0],
        [x3, 0, -x1, y3, 0, -y1, z3, 0, -z1, 0],
        [-x2, x1, 0, -y2, y1, 0, -z2, z1, 0, 0],
        [0, -y3, y2, 0, -x3, x2, z4, 0, 0, -z1],
        [y3, 0, -y1, x3, 0, -x1, 0, z4, 0, -z2],
        [-y2, y1, 0, -x2, x1, 0, 0, 0, z4, -z3],
        [0, -z3, z2, -z4, 0, 0, 0, -x3, x2, y1],
        [z3, 0, -z1, 0, -z4, 0, x3, 0, -x1, y2],
        [-z2, z1, 0, 0, 0, -z4, -x2, x1, 0, y3],
        [0, 0, 0, z1, z2, z3, -y1, -y2, -y3, 0],
    ], dtype=float)


def grad_hamiltonian(c, J: InertiaSpec) -> np.ndarray:
    """Gradient of H in coordinates; equals the coordinates of Omega."""
    return coordinate_weights(J) * as_coords(c)


def grad_casimir1(c) -> np.ndarray:
    return np.array(as_coords(c), dtype=float)


def grad_casimir2(c) -> np.ndarray:
    """Gradient of Tr(M^4)/8 relative to <.,.> is -M^3."""
    A = coords_to_full(as_coords(c))
    return full_to_coords(-(A @ A @ A))


def finite_difference_gradient(f, c, step=None) -> np.ndarray:
    """Central differences; for tests only.  Default step is 1e-6 * max(1, |c|)."""
    c = np.asarray(c, dtype=float)
    h = 1e-6 * max(1.0, float(np.linalg.norm(c))) if step is None else step
    g = np.empty(c.size)
    for k in range(c.size):
        e = np.zeros(c.size)
        e[k] = h
        g[k] = (f(c + e) - f(c - e)) / (2 * h)
    return g


def random_skew(n: int, rng: np.random.Generator, scale: float = 1.0) -> SkewMatrix:
    """Gaussian state rescaled so that its norm equals ``scale``."""
    u = rng.standard_normal(n * (n - 1) // 2)
    return SkewMatrix(n, scale * u / np.linalg.norm(u))


def random_inertia(n: int, rng: np.random.Generator, low=0.2, high=5.0, min_gap=0.05,
                   ordered=True) -> InertiaSpec:
    """Positive, pairwise separated inertia parameters (descending when ``ordered``)."""
    while True:
        lam = np.sort(rng.uniform(low, high, n))[::-1]
        if np.all(-np.diff(lam) >= min_gap):
            break
    if not ordered:
        lam = rng.permutation(lam)
    return InertiaSpec(tuple(float(v) for v in lam))


def check_n(M: SkewMatrix, n: int):
    if M.n != n:
        raise DimensionError(f"expected so({n}), got so({M.n})")
    return M
