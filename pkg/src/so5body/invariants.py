"""Conserved quantities of the so(n) free rigid body.

Casimirs C1, C2; Mishchenko integrals m_r; the generator integrals F_i with
m_r = sum_i lambda_i^r F_i; the so(5) integrals K1, K2, K3; and the
coefficients of Tr(M + gamma J^2)^r / (2r) as polynomials in gamma.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import DimensionError, So5Error
from .lie_core import (
    COORD_ENTRIES, InertiaSpec, SkewMatrix, as_coords, check_n, coords_to_full,
    full_to_coords, hamiltonian,
)


@dataclass(frozen=True)
class IntegralValue:
    name: str
    value: float
    degree: int


def _pairs_check(M: SkewMatrix, J: InertiaSpec):
    if M.n != J.n:
        raise DimensionError(f"state is so({M.n}) but inertia has {J.n} parameters")


# ---------------------------------------------------------------------------
# Casimirs
# ---------------------------------------------------------------------------

def casimir1(M: SkewMatrix) -> float:
    A = M.full()
    return -0.25 * float(np.trace(A @ A))


def casimir2(M: SkewMatrix) -> float:
    A = M.full()
    A2 = A @ A
    return 0.125 * float(np.sum(A2 * A2.T))


def casimirs(M: SkewMatrix) -> tuple[float, float]:
    """(C1, C2) = (-Tr(M^2)/4, Tr(M^4)/8) on so(5)."""
    check_n(M, 5)
    return casimir1(M), casimir2(M)


def casimirs_expanded(c) -> tuple[float, float]:
    """Casimirs from their coordinate polynomials."""
    x1, x2, x3, y1, y2, y3, z1, z2, z3, z4 = as_coords(c)
    c1 = 0.5 * (x1**2 + x2**2 + x3**2 + y1**2 + y2**2 + y3**2
                + z1**2 + z2**2 + z3**2 + z4**2)
    c2 = 0.125 * (
        (x2**2 + x3**2 + y1**2 + z1**2)**2 + (x1**2 + x3**2 + y2**2 + z2**2)**2
        + (x1**2 + x2**2 + y3**2 + z3**2)**2 + (y1**2 + y2**2 + y3**2 + z4**2)**2
        + (z1**2 + z2**2 + z3**2 + z4**2)**2 + 2 * (y1*z1 + y2*z2 + y3*z3)**2
        + 2 * (x2*y3 - x3*y2 - z1*z4)**2 + 2 * (x3*y1 - x1*y3 - z2*z4)**2
        + 2 * (x1*y2 - x2*y1 - z3*z4)**2
        + 2 * (x3*z2 - x2*z3 - y1*z4)**2 + 2 * (x1*z3 - x3*z1 - y2*z4)**2
        + 2 * (x2*z1 - x1*z2 - y3*z4)**2
        + 2 * (x1*x2 - y1*y2 - z1*z2)**2 + 2 * (x1*x3 - y1*y3 - z1*z3)**2
        + 2 * (x2*x3 - y2*y3 - z2*z3)**2)
    return float(c1), float(c2)


# ---------------------------------------------------------------------------
# Quadratic integrals
# ---------------------------------------------------------------------------

def _require_distinct(J: InertiaSpec):
    sq = J.array ** 2
    for i in range(J.n):
        for k in range(i + 1, J.n):
            if sq[i] == sq[k]:
                raise So5Error(
                    f"lambda_{i + 1}^2 = lambda_{k + 1}^2; quotient coefficients undefined")


def mishchenko_integral(M: SkewMatrix, J: InertiaSpec, r: int) -> float:
    """m_r = sum_{i<k} (lambda_i^r - lambda_k^r) / (lambda_i^2 - lambda_k^2) m_ik^2."""
    _pairs_check(M, J)
    if int(r) != r or r < 1:
        raise So5Error(f"order r must be a positive integer, got {r}")
    _require_distinct(J)
    lam = J.array
    i, k = np.triu_indices(M.n, 1)
    coef = (lam[i] ** r - lam[k] ** r) / (lam[i] ** 2 - lam[k] ** 2)
    return float(np.sum(coef * M.upper ** 2))


def generator_integrals(M: SkewMatrix, J: InertiaSpec) -> np.ndarray:
    """All F_i(M) = sum_{k != i} m_ik^2 / (lambda_i^2 - lambda_k^2), i = 1..n."""
    _pairs_check(M, J)
    _require_distinct(J)
    sq = J.array ** 2
    D = sq[:, None] - sq[None, :]
    np.fill_diagonal(D, 1.0)
    A = M.full()
    return np.sum(A * A / D, axis=1)


def generator_integral(M: SkewMatrix, J: InertiaSpec, i: int) -> float:
    """F_i with 1-based index i."""
    if not 1 <= i <= M.n:
        raise IndexError(f"generator index must be in 1..{M.n}, got {i}")
    return float(generator_integrals(M, J)[i - 1])


def _pair_form(M: SkewMatrix, J: InertiaSpec, weight) -> float:
    lam = J.array
    i, k = np.triu_indices(M.n, 1)
    return 0.5 * float(np.sum(weight(lam[i], lam[k]) * M.upper ** 2))


def manakov_k1(M: SkewMatrix, J: InertiaSpec) -> float:
    """1/2 sum_{i<j} (lambda_i^2 + lambda_j^2) m_ij^2."""
    check_n(M, 5)
    _pairs_check(M, J)
    return _pair_form(M, J, lambda a, b: a**2 + b**2)


def manakov_k2(M: SkewMatrix, J: InertiaSpec) -> float:
    """1/2 sum_{i<j} (lambda_i^4 + lambda_j^4 + lambda_i^2 lambda_j^2) m_ij^2."""
    check_n(M, 5)
    _pairs_check(M, J)
    return _pair_form(M, J, lambda a, b: a**4 + b**4 + a**2 * b**2)


def trace_power_form(M: SkewMatrix, J: InertiaSpec, power: int) -> float:
    """-1/4 Tr(sum_{p=0}^{power} J^p M J^(power-p) Omega)."""
    _pairs_check(M, J)
    A = M.full()
    W = A / J.sums
    lam = J.array
    S = sum(np.diag(lam ** p) @ A @ np.diag(lam ** (power - p)) for p in range(power + 1))
    return -0.25 * float(np.trace(S @ W))


def _t_polynomials(c):
    x1, x2, x3, y1, y2, y3, z1, z2, z3, z4 = as_coords(c)
    return np.array([
        (x3*z2 - x2*z3 - y1*z4)**2 + (x2*y3 - x3*y2 - z1*z4)**2 + (x1*x3 - y1*y3 - z1*z3)**2
        + (x1*x2 - y1*y2 - z1*z2)**2 + (x2**2 + x3**2 + y1**2 + z1**2)**2,
        (x1*z3 - x3*z1 - y2*z4)**2 + (x3*y1 - x1*y3 - z2*z4)**2 + (x2*x3 - y2*y3 - z2*z3)**2
        + (x1*x2 - y1*y2 - z1*z2)**2 + (x1**2 + x3**2 + y2**2 + z2**2)**2,
        (x2*z1 - x1*z2 - y3*z4)**2 + (x1*y2 - x2*y1 - z3*z4)**2 + (x1*x3 - y1*y3 - z1*z3)**2
        + (x2*x3 - y2*y3 - z2*z3)**2 + (x1**2 + x2**2 + y3**2 + z3**2)**2,
        (y1*z1 + y2*z2 + y3*z3)**2 + (x3*y1 - x1*y3 - z2*z4)**2 + (x2*y3 - x3*y2 - z1*z4)**2
        + (x1*y2 - x2*y1 - z3*z4)**2 + (y1**2 + y2**2 + y3**2 + z4**2)**2,
        (x3*z2 - x2*z3 - y1*z4)**2 + (x1*z3 - x3*z1 - y2*z4)**2 + (x2*z1 - x1*z2 - y3*z4)**2
        + (y1*z1 + y2*z2 + y3*z3)**2 + (z1**2 + z2**2 + z3**2 + z4**2)**2,
    ])


def manakov_k3(M: SkewMatrix, J: InertiaSpec) -> float:
    """K3 = (1/10) sum_j T_j lambda_j^2 with the quartic polynomials T_1..T_5."""
    check_n(M, 5)
    _pairs_check(M, J)
    return 0.1 * float(np.dot(_t_polynomials(M), J.array ** 2))


# ---------------------------------------------------------------------------
# gamma-expansion of Tr(M + gamma J^2)^r / (2r)
# ---------------------------------------------------------------------------

def manakov_expansion(M: SkewMatrix, J: InertiaSpec, r: int) -> np.ndarray:
    """Coefficients of gamma^0 .. gamma^r in Tr(M + gamma J^2)^r / (2r)."""
    check_n(M, 5)
    _pairs_check(M, J)
    if r not in (2, 3, 4, 5):
        raise So5Error(f"expansion order r must be in 2..5, got {r}")
    A = M.full()
    D = np.diag(J.array ** 2)
    # poly[p] is the matrix coefficient of gamma^p
    poly = [A, D]
    for _ in range(r - 1):
        nxt = [np.zeros((5, 5)) for _ in range(len(poly) + 1)]
        for p, P in enumerate(poly):
            nxt[p] += P @ A
            nxt[p + 1] += P @ D
        poly = nxt
    return np.array([np.trace(P) for P in poly]) / (2 * r)


def _m8(M, J):
    return mishchenko_integral(M, J, 8)


# Candidate integrals for identifying expansion coefficients, grouped by degree.
QUADRATIC_FEATURES = {
    "C1": lambda M, J: casimir1(M),
    "K1": manakov_k1,
    "K2": manakov_k2,
    "m8": _m8,
}
QUARTIC_FEATURES = {
    "C2": lambda M, J: casimir2(M),
    "K3": manakov_k3,
    "C1^2": lambda M, J: casimir1(M) ** 2,
    "C1*K1": lambda M, J: casimir1(M) * manakov_k1(M, J),
    "C1*K2": lambda M, J: casimir1(M) * manakov_k2(M, J),
    "K1^2": lambda M, J: manakov_k1(M, J) ** 2,
    "K1*K2": lambda M, J: manakov_k1(M, J) * manakov_k2(M, J),
    "K2^2": lambda M, J: manakov_k2(M, J) ** 2,
}


def identify_expansion_coefficient(J: InertiaSpec, r: int, power: int, rng, samples=60):
    """Least-squares fit of one expansion coefficient against known integrals.

    The gamma^power coefficient of the order-r expansion is homogeneous of
    degree r - power in M.  It is regressed on the candidate integrals of
    that degree plus a constant.  Returns ``(coefficients, constant,
    max_residual)``; the residual is relative to the largest target value.
    """
    degree = r - power
    if degree == 0:
        feats = {}
    elif degree == 2:
        feats = QUADRATIC_FEATURES
    elif degree == 4:
        feats = QUARTIC_FEATURES
    else:
        raise So5Error(f"gamma^{power} of order {r} is odd in M and vanishes identically")
    rows, target = [], []
    for _ in range(samples):
        u = rng.standard_normal(10)
        M = SkewMatrix(5, u * rng.uniform(0.5, 2.0) / np.linalg.norm(u))
        target.append(manakov_expansion(M, J, r)[power])
        rows.append([f(M, J) for f in feats.values()] + [1.0])
    X, y = np.array(rows), np.array(target)
    # column scaling keeps the normal equations well conditioned
    scale = np.max(np.abs(X), axis=0)
    sol, *_ = np.linalg.lstsq(X / scale, y, rcond=None)
    sol = sol / scale
    resid = np.max(np.abs(X @ sol - y)) / max(1.0, np.max(np.abs(y)))
    coeffs = dict(zip(feats, sol[:-1].tolist()))
    return coeffs, float(sol[-1]), float(resid)


def load_manakov_identification() -> dict:
    """The frozen identification fixture shipped with the package."""
    text = resources.files(__package__).joinpath("data/manakov_identification.json").read_text()
    return json.loads(text)


def integral_snapshot(M: SkewMatrix, J: InertiaSpec) -> dict:
    """Invariant report: H, C1, C2, K1, K2, K3, F[5], m[r=1..n]."""
    check_n(M, 5)
    c1, c2 = casimirs(M)
    return {
        "H": hamiltonian(M, J),
        "C1": c1,
        "C2": c2,
        "K1": manakov_k1(M, J),
        "K2": manakov_k2(M, J),
        "K3": manakov_k3(M, J),
        "F": generator_integrals(M, J).tolist(),
        "m": [mishchenko_integral(M, J, r) for r in range(1, M.n + 1)],
    }


# ---------------------------------------------------------------------------
# Batched evaluation on coordinate arrays (used for drift reports)
# ---------------------------------------------------------------------------

def tracked_integrals(coords: np.ndarray, J: InertiaSpec) -> dict:
    """H, C1, C2, K1, K2, K3, F1..F5 for every row of an (N, 10) coordinate array."""
    J.require_dim(5)
    A = coords_to_full(coords)
    lam = J.array
    sq = lam ** 2
    A2 = A @ A
    sqA = A * A
    out = {}
    out["H"] = 0.25 * np.sum(sqA / J.sums, axis=(-1, -2))
    out["C1"] = 0.25 * np.sum(sqA, axis=(-1, -2))
    out["C2"] = 0.125 * np.sum(A2 * A2, axis=(-1, -2))
    out["K1"] = 0.25 * np.sum(sqA * (sq[:, None] + sq[None, :]), axis=(-1, -2))
    w2 = sq[:, None] ** 2 + sq[None, :] ** 2 + sq[:, None] * sq[None, :]
    out["K2"] = 0.25 * np.sum(sqA * w2, axis=(-1, -2))
    # T_j is the j-th diagonal entry of M^4 = (M^2)^2 with M^2 symmetric
    T = np.sum(A2 * A2, axis=-1)
    out["K3"] = 0.1 * T @ sq
    Dd = sq[:, None] - sq[None, :]
    np.fill_diagonal(Dd, 1.0)
    F = np.sum(sqA / Dd, axis=-1)
    for i in range(5):
        out[f"F{i + 1}"] = F[..., i]
    return out


def integral_gradients(c, J: InertiaSpec) -> dict:
    """Coordinate gradients of H, C1, C2, K1, K2, K3 at one so(5) state."""
    J.require_dim(5)
    c = np.asarray(as_coords(c), dtype=float)
    A = coords_to_full(c)
    lam = J.array
    sq = lam ** 2
    A2 = A @ A
    A3 = A2 @ A
    J2 = np.diag(sq)
    # d/dM of Tr(J^2 M^4)/10, antisymmetrized and mapped through <X,Y> = -Tr(XY)/2
    S = A3 @ J2 + A2 @ J2 @ A + A @ J2 @ A2 + J2 @ A3
    pair_w = lambda f: np.array([f(lam[i], lam[j]) for (i, j), _ in COORD_ENTRIES])  # noqa: E731
    return {
        "H": pair_w(lambda a, b: 1 / (a + b)) * c,
        "C1": c.copy(),
        "C2": full_to_coords(-A3),
        "K1": pair_w(lambda a, b: a**2 + b**2) * c,
        "K2": pair_w(lambda a, b: a**4 + b**4 + a**2 * b**2) * c,
        "K3": full_to_coords(-(S - S.T) / 10),
    }
