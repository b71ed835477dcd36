"""Equilibria of the so(5) free rigid body.

Two kinds of equilibria are catalogued: the fifteen coordinate Cartan
subalgebras t1..t15 (each meeting a regular adjoint orbit in eight points)
and the ten three-dimensional families s1..s10 whose spanning vectors depend
on the inertia parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OrbitError
from .invariants import casimirs
from .lie_core import (
    InertiaSpec,
    SkewMatrix,
    as_coords,
    coords_to_matrix,
    rhs_coords,
    rhs_jacobian_coords,
    rigid_body_rhs,
)


# ---------------------------------------------------------------------------
# Orbit invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitInvariants:
    """Values (c1, c2) of the Casimirs C1, C2 selecting an adjoint orbit."""

    c1: float
    c2: float

    def violations(self) -> list[str]:
        c1, c2 = self.c1, self.c2
        out = []
        if not c1 > 0:
            out.append("c1 > 0")
        if not c2 > 0:
            out.append("c2 > 0")
        if not 2 * c2 > c1 * c1:
            out.append("2c2 > c1^2")
        if not c1 * c1 > c2:
            out.append("c1^2 > c2")
        return out

    def is_regular(self) -> bool:
        return not self.violations()

    def require_regular(self) -> "OrbitInvariants":
        bad = self.violations()
        if bad:
            raise OrbitError(
                f"orbit (c1={self.c1!r}, c2={self.c2!r}) is not regular: "
                f"violates {', '.join(bad)} (need c1>0, c2>0, 2c2>c1^2>c2)")
        return self

    @classmethod
    def from_ab(cls, a: float, b: float) -> "OrbitInvariants":
        return cls((a * a + b * b) / 2, (a**4 + b**4) / 4)

    @classmethod
    def of(cls, M: SkewMatrix) -> "OrbitInvariants":
        return cls(*casimirs(M))


def weyl_ab(inv: OrbitInvariants) -> tuple[float, float]:
    """The Cartan coordinates (a, b), a > b > 0, of a regular orbit."""
    inv.require_regular()
    r = math.sqrt(2 * inv.c2 - inv.c1**2)
    return math.sqrt(inv.c1 + r), math.sqrt(inv.c1 - r)


# ---------------------------------------------------------------------------
# Cartan families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CartanFamily:
    """Coordinate Cartan subalgebra t_k with its printed two-parameter matrix.

    ``a_entry`` and ``b_entry`` are ((i, j), sign) with 1-based matrix indices:
    the builder puts sign*a at (i, j) and sign*b at the other entry.
    """

    k: int
    basis_pair: tuple[int, int]
    a_entry: tuple[tuple[int, int], int]
    b_entry: tuple[tuple[int, int], int]

    @property
    def name(self) -> str:
        return f"t{self.k}"

    def builder(self, a: float, b: float) -> SkewMatrix:
        A = np.zeros((5, 5))
        for ((i, j), s), v in ((self.a_entry, a), (self.b_entry, b)):
            A[i - 1, j - 1] = s * v
            A[j - 1, i - 1] = -s * v
        return SkewMatrix.from_full(A)

    __call__ = builder

    def basis_coordinates(self) -> np.ndarray:
        """10 x 2 matrix whose columns are the two spanning basis coordinates."""
        P = np.zeros((10, 2))
        for col, e in enumerate(self.basis_pair):
            P[e - 1, col] = 1.0
        return P


CARTAN_FAMILIES = {
    1: CartanFamily(1, (3, 6), ((1, 2), 1), ((3, 4), 1)),
    2: CartanFamily(2, (6, 8), ((2, 5), 1), ((3, 4), -1)),
    3: CartanFamily(3, (6, 7), ((1, 5), 1), ((3, 4), -1)),
    4: CartanFamily(4, (5, 7), ((1, 5), 1), ((2, 4), 1)),
    5: CartanFamily(5, (1, 7), ((1, 5), 1), ((2, 3), -1)),
    6: CartanFamily(6, (2, 5), ((1, 3), 1), ((2, 4), -1)),
    7: CartanFamily(7, (5, 9), ((2, 4), 1), ((3, 5), -1)),
    8: CartanFamily(8, (1, 10), ((2, 3), 1), ((4, 5), -1)),
    9: CartanFamily(9, (1, 4), ((1, 4), 1), ((2, 3), -1)),
    10: CartanFamily(10, (2, 8), ((1, 3), 1), ((2, 5), -1)),
    11: CartanFamily(11, (4, 8), ((1, 4), 1), ((2, 5), -1)),
    12: CartanFamily(12, (3, 10), ((1, 2), 1), ((4, 5), 1)),
    13: CartanFamily(13, (3, 9), ((1, 2), 1), ((3, 5), -1)),
    14: CartanFamily(14, (4, 9), ((1, 4), 1), ((3, 5), -1)),
    15: CartanFamily(15, (2, 10), ((1, 3), 1), ((4, 5), 1)),
}

SLOTS = ("a,b", "-a,-b", "b,a", "-b,-a", "-a,b", "a,-b", "b,-a", "-b,a")


def parse_slot(slot: str) -> tuple[tuple[int, str], tuple[int, str]]:
    """'-b,a' -> ((-1, 'b'), (1, 'a'))."""
    text = slot.replace(" ", "").replace("(", "").replace(")", "")
    if text not in SLOTS:
        raise OrbitError(f"unknown slot {slot!r}; expected one of {', '.join(SLOTS)}")
    out = []
    for tok in text.split(","):
        out.append((-1, tok[1]) if tok.startswith("-") else (1, tok))
    return tuple(out)


def slot_values(slot: str, a: float, b: float) -> tuple[float, float]:
    vals = {"a": a, "b": b}
    (s1, n1), (s2, n2) = parse_slot(slot)
    return s1 * vals[n1], s2 * vals[n2]


def slot_class(slot: str) -> str:
    """'ab' for the (+-a, +-b) slots, 'ba' for the swapped ones."""
    return "ab" if parse_slot(slot)[0][1] == "a" else "ba"


@dataclass(frozen=True)
class CartanSlot:
    k: int
    slot: str

    @property
    def slot_class(self) -> str:
        return slot_class(self.slot)

    def label(self) -> str:
        return f"t{self.k}[{self.slot}]"


@dataclass(frozen=True)
class Continuous:
    l: int
    coefficients: tuple[float, float, float]

    def label(self) -> str:
        return f"s{self.l}{list(self.coefficients)}"


@dataclass(frozen=True)
class EquilibriumPoint:
    matrix: SkewMatrix
    provenance: CartanSlot | Continuous

    @property
    def coords(self) -> np.ndarray:
        return as_coords(self.matrix)


def _family(k: int) -> CartanFamily:
    try:
        return CARTAN_FAMILIES[int(k)]
    except (KeyError, ValueError):
        raise OrbitError(f"Cartan family index must be 1..15, got {k!r}") from None


def cartan_point(k: int, slot: str, inv: OrbitInvariants) -> EquilibriumPoint:
    a, b = weyl_ab(inv)
    p, q = slot_values(slot, a, b)
    return EquilibriumPoint(_family(k).builder(p, q), CartanSlot(int(k), slot))


def weyl_orbit_points(k: int, inv: OrbitInvariants) -> list[EquilibriumPoint]:
    """The eight points of t_k on the orbit, in SLOTS order."""
    fam = _family(k)
    a, b = weyl_ab(inv)
    return [EquilibriumPoint(fam.builder(*slot_values(s, a, b)), CartanSlot(fam.k, s))
            for s in SLOTS]


# ---------------------------------------------------------------------------
# Continuous families
# ---------------------------------------------------------------------------

# For each odd l: three (i, pair_i, j, pair_j, kind) giving the vector
# E_i/(lambda+lambda)_{pair_i} + sign*E_j/(lambda+lambda)_{pair_j}.
# l odd takes sign = kind, l even takes sign = -kind.
_CONTINUOUS = {
    1: ((1, (1, 4), 4, (2, 3), 1), (2, (2, 4), 5, (1, 3), 1), (3, (3, 4), 6, (1, 2), 1)),
    3: ((1, (4, 5), 10, (2, 3), 1), (5, (3, 5), 9, (2, 4), 1), (6, (2, 5), 8, (3, 4), -1)),
    5: ((2, (4, 5), 10, (1, 3), 1), (6, (1, 5), 7, (3, 4), 1), (4, (3, 5), 9, (1, 4), -1)),
    7: ((1, (1, 5), 7, (2, 3), 1), (2, (2, 5), 8, (1, 3), 1), (3, (3, 5), 9, (1, 2), 1)),
    9: ((3, (4, 5), 10, (1, 2), 1), (4, (2, 5), 8, (1, 4), 1), (5, (1, 5), 7, (2, 4), -1)),
}


@dataclass(frozen=True)
class ContinuousFamily:
    l: int
    spanning_triple: tuple[SkewMatrix, SkewMatrix, SkewMatrix]
    J: InertiaSpec = field(repr=False)

    @property
    def name(self) -> str:
        return f"s{self.l}"

    def basis_coordinates(self) -> np.ndarray:
        """10 x 3 matrix with the spanning vectors as columns."""
        return np.column_stack([as_coords(v) for v in self.spanning_triple])

    def point(self, coefficients) -> EquilibriumPoint:
        coefficients = tuple(float(x) for x in coefficients)
        if len(coefficients) != 3:
            raise ValueError("a continuous family point needs 3 coefficients")
        c = self.basis_coordinates() @ np.array(coefficients)
        return EquilibriumPoint(coords_to_matrix(c), Continuous(self.l, coefficients))


def continuous_family(l: int, J: InertiaSpec) -> ContinuousFamily:
    J.require_dim(5)
    if int(l) != l or not 1 <= l <= 10:
        raise OrbitError(f"continuous family index must be 1..10, got {l!r}")
    l = int(l)
    lam = J.lambdas
    sign = 1 if l % 2 else -1
    s = lambda p: lam[p[0] - 1] + lam[p[1] - 1]  # noqa: E731
    triple = []
    for i, pi, j, pj, kind in _CONTINUOUS[l if l % 2 else l - 1]:
        v = np.zeros(10)
        v[i - 1] = 1 / s(pi)
        v[j - 1] = sign * kind / s(pj)
        triple.append(coords_to_matrix(v))
    return ContinuousFamily(l, tuple(triple), J)


# ---------------------------------------------------------------------------
# Predicates and family membership
# ---------------------------------------------------------------------------

def equilibrium_scale(M: SkewMatrix, J: InertiaSpec) -> float:
    iu = np.triu_indices(J.n, 1)
    return max(1.0, M.norm() ** 2 / float(np.min(J.sums[iu])))


def is_equilibrium(M: SkewMatrix, J: InertiaSpec, tol: float = 1e-12) -> tuple[bool, float]:
    """(ok, residual) with ok iff |[M, Omega]| <= tol * max(1, |M|^2 / min(lambda_i + lambda_j))."""
    residual = rigid_body_rhs(M, J).norm()
    return residual <= tol * equilibrium_scale(M, J), residual


def family_subspaces(J: InertiaSpec) -> dict[str, np.ndarray]:
    """Orthonormal coordinate bases of t1..t15 and s1..s10.

    The coordinates are orthonormal for <.,.>, so Euclidean projection in
    coordinates is orthogonal projection in the invariant inner product.
    """
    out = {fam.name: fam.basis_coordinates() for fam in CARTAN_FAMILIES.values()}
    for l in range(1, 11):
        Q, _ = np.linalg.qr(continuous_family(l, J).basis_coordinates())
        out[f"s{l}"] = Q
    return out


def family_distance(M, basis: np.ndarray) -> float:
    c = as_coords(M)
    return float(np.linalg.norm(c - basis @ (basis.T @ c)))


def nearest_family(M, J: InertiaSpec, subspaces=None) -> tuple[str, float]:
    """Name of the closest family subspace and the relative distance to it."""
    c = as_coords(M)
    subspaces = family_subspaces(J) if subspaces is None else subspaces
    nrm = max(float(np.linalg.norm(c)), 1e-300)
    best = min(((family_distance(c, P) / nrm, name) for name, P in subspaces.items()))
    return best[1], best[0]


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------

def _solve_root(c0: np.ndarray, J: InertiaSpec, max_iter=2000, tol=1e-17):
    """Damped Gauss-Newton on |rhs|^2 restricted to the unit sphere.

    The field is homogeneous, so roots are rescaled back to norm 1 after each
    step.  Roots where several families meet are degenerate and converge only
    linearly, with distance ~ sqrt(residual); hence the tight default tol.
    Returns (c, residual, iterations).
    """
    c = c0 / np.linalg.norm(c0)
    mu = 1e-3
    r = rhs_coords(c, J)
    f = float(r @ r)
    for it in range(1, max_iter + 1):
        if math.sqrt(f) <= tol:
            return c, math.sqrt(f), it - 1
        A = rhs_jacobian_coords(c, J)
        # tangent to the sphere only
        P = np.eye(10) - np.outer(c, c)
        A = A @ P
        g = A.T @ r
        H = A.T @ A
        while True:
            step = np.linalg.solve(H + mu * (np.eye(10) + np.outer(c, c)), -g)
            trial = c + step
            trial /= np.linalg.norm(trial)
            rt = rhs_coords(trial, J)
            ft = float(rt @ rt)
            if ft < f:
                c, r, f = trial, rt, ft
                mu = max(mu / 10, 1e-15)
                break
            mu *= 10
            if mu > 1e10:
                return c, math.sqrt(f), it
    return c, math.sqrt(f), max_iter


@dataclass
class CensusReport:
    samples: int
    converged: int = 0
    outside: list = field(default_factory=list)
    max_distance: float = 0.0
    family_counts: dict = field(default_factory=dict)
    tolerance: float = 1e-8

    @property
    def ok(self) -> bool:
        return not self.outside

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "converged": self.converged,
            "outside_catalog": len(self.outside),
            "outside_points": [list(map(float, c)) for c in self.outside],
            "max_distance": self.max_distance,
            "tolerance": self.tolerance,
            "family_counts": dict(sorted(self.family_counts.items(),
                                         key=lambda kv: (kv[0][0], int(kv[0][1:])))),
        }


def equilibrium_census(J: InertiaSpec, samples: int, rng=None, seed=None,
                       tol: float = 1e-8, starts=None) -> CensusReport:
    """Random-start root search for equilibria, checked against the catalog.

    Each start is driven to a zero of the vector field on the unit sphere.
    Converged roots are assigned to the nearest family subspace; any root
    farther than ``tol`` from every family is recorded as outside the
    catalog.  This falsifies, it does not prove, exhaustiveness.
    """
    J.require_dim(5)
    if rng is None:
        rng = np.random.default_rng(seed)
    subspaces = family_subspaces(J)
    report = CensusReport(samples=int(samples), tolerance=tol)
    for s in range(int(samples)):
        c0 = rng.standard_normal(10) if starts is None else np.asarray(starts[s], float)
        c, res, _ = _solve_root(c0, J)
        if res > 1e-12:
            continue
        report.converged += 1
        name, dist = nearest_family(c, J, subspaces)
        report.family_counts[name] = report.family_counts.get(name, 0) + 1
        report.max_distance = max(report.max_distance, dist)
        if dist > tol:
            report.outside.append(c)
    return report


# ---------------------------------------------------------------------------
# Catalog export
# ---------------------------------------------------------------------------

def _family_filter(families):
    if families is None:
        return None
    names = {f.strip() for f in families if f.strip()}
    valid = {f"t{k}" for k in range(1, 16)} | {f"s{l}" for l in range(1, 11)}
    unknown = sorted(names - valid)
    if unknown:
        raise OrbitError(f"unknown families: {', '.join(unknown)}")
    return names


def catalog(J: InertiaSpec, inv: OrbitInvariants, families=None) -> dict:
    """JSON-ready catalog of the Weyl points and continuous-family spanning vectors."""
    J.require_dim(5)
    a, b = weyl_ab(inv)
    keep = _family_filter(families)
    points = []
    for k in CARTAN_FAMILIES:
        if keep is not None and f"t{k}" not in keep:
            continue
        for eq in weyl_orbit_points(k, inv):
            _, res = is_equilibrium(eq.matrix, J)
            c1, c2 = casimirs(eq.matrix)
            points.append({
                "family": f"t{k}",
                "slot": eq.provenance.slot,
                "matrix": eq.matrix.to_json(),
                "coords": as_coords(eq.matrix),
                "casimirs": [c1, c2],
                "residual": res,
            })
    continuous = []
    for l in range(1, 11):
        if keep is not None and f"s{l}" not in keep:
            continue
        fam = continuous_family(l, J)
        continuous.append({
            "family": fam.name,
            "spanning": [v.to_json() for v in fam.spanning_triple],
            "coords": [as_coords(v) for v in fam.spanning_triple],
            "residual": max(is_equilibrium(v, J)[1] for v in fam.spanning_triple),
        })
    return {
        "lambdas": [float(x) for x in J.array],
        "c1": inv.c1,
        "c2": inv.c2,
        "a": a,
        "b": b,
        "points": points,
        "continuous": continuous,
    }
