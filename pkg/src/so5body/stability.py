"""Linear and nonlinear stability of the Cartan equilibria of so(5).

Linear analysis restricts the Jacobian of the vector field to the tangent
space of the adjoint orbit, where the spectrum is compared with closed-form
characteristic factors.  Nonlinear stability is certified by the
energy-Casimir method: a combination of generator integrals plus multiples
of the Casimirs that is critical at the equilibrium and has a definite
Hessian on the orbit tangent space.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .equilibria import (
    CARTAN_FAMILIES,
    SLOTS,
    CartanSlot,
    EquilibriumPoint,
    OrbitInvariants,
    cartan_point,
    slot_class,
)
from .errors import DegeneratePointError, So5Error
from .invariants import casimirs
from .lie_core import (
    COORD_ENTRIES,
    InertiaSpec,
    SkewMatrix,
    as_coords,
    coords_to_full,
    coords_to_matrix,
    grad_casimir1,
    grad_casimir2,
    rhs_jacobian_coords,
)

UNSTABLE = "Unstable"
STABLE = "NonlinearlyStable"
OPEN = "Open"

OPEN_NOTE = "the stability problem remains open"


# ---------------------------------------------------------------------------
# Linearization on the orbit
# ---------------------------------------------------------------------------

def jacobian(M: SkewMatrix, J: InertiaSpec) -> np.ndarray:
    """Analytic 10 x 10 Jacobian of the so(5) vector field in coordinates."""
    return rhs_jacobian_coords(as_coords(M), J)


def _casimir_gradients(c) -> np.ndarray:
    return np.array([grad_casimir1(c), grad_casimir2(c)])


def tangent_projector(M, rel_tol=1e-10) -> np.ndarray:
    """10 x 8 orthonormal coordinates spanning ker dC1 ∩ ker dC2 at M."""
    c = as_coords(M)
    G = _casimir_gradients(c)
    _, s, Vt = np.linalg.svd(G)
    if s[0] == 0 or s[1] <= rel_tol * s[0]:
        raise DegeneratePointError(
            "dC1 and dC2 are dependent at this point; the orbit is not regular here")
    return Vt[2:].T


def orbit_tangent_basis(M) -> list[SkewMatrix]:
    """Orthonormal (for <.,.>) basis of the orbit tangent space at M."""
    return [coords_to_matrix(v) for v in tangent_projector(M).T]


def _cartan_tangent(eq: EquilibriumPoint) -> tuple[np.ndarray, list[int]]:
    """Coordinate complement of the Cartan pair (the orbit tangent space there)."""
    pair = CARTAN_FAMILIES[eq.provenance.k].basis_pair
    idx = [i for i in range(10) if i + 1 not in pair]
    return np.eye(10)[:, idx], idx


def cartan_args(eq: EquilibriumPoint) -> tuple[float, float]:
    """Builder arguments (p, q) with eq.matrix == builder(p, q)."""
    fam = CARTAN_FAMILIES[eq.provenance.k]
    M = eq.matrix
    (ia, sa), (ib, sb) = fam.a_entry, fam.b_entry
    return sa * M[ia[0] - 1, ia[1] - 1], sb * M[ib[0] - 1, ib[1] - 1]


# ---------------------------------------------------------------------------
# Closed-form characteristic factors
# ---------------------------------------------------------------------------

# Per family: U row (sq, lin1, lin2, sign, d1, d2), V row likewise,
# W row (q1, q2, l1, l2, l3, l4) and W'' row (sign, d1..d4, a-pair, b-pair).
#   U  = s(sq)^2 s(lin1) s(lin2),      U'  = sign b^2 d(d1) d(d2)
#   V  = s(sq)^2 s(lin1) s(lin2),      V'  = sign a^2 d(d1) d(d2)
#   W  = s(q1)^4 s(q2)^4 s(l1) s(l2) s(l3) s(l4)
#   W'' = sign d(d1) d(d2) d(d3) d(d4) [a^2 s(a-pair)^2 - b^2 s(b-pair)^2]^2
# with s(ij) = lambda_i + lambda_j and d(ij) = lambda_i - lambda_j.
_FACTORS = {
    1: (((3, 4), (3, 5), (4, 5), 1, (3, 5), (4, 5)), ((1, 2), (1, 5), (2, 5), 1, (1, 5), (2, 5)),
        ((1, 2), (3, 4), (1, 3), (1, 4), (2, 3), (2, 4)),
        (1, (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (1, 2))),
    2: (((2, 5), (1, 2), (1, 5), 1, (1, 2), (1, 5)), ((3, 4), (1, 3), (1, 4), 1, (1, 3), (1, 4)),
        ((2, 5), (3, 4), (2, 3), (2, 4), (3, 5), (4, 5)),
        (1, (2, 3), (2, 4), (3, 5), (4, 5), (2, 5), (3, 4))),
    3: (((1, 5), (1, 2), (2, 5), -1, (1, 2), (2, 5)), ((3, 4), (2, 3), (2, 4), 1, (2, 3), (2, 4)),
        ((1, 5), (3, 4), (1, 3), (1, 4), (3, 5), (4, 5)),
        (1, (1, 3), (1, 4), (3, 5), (4, 5), (1, 5), (3, 4))),
    4: (((1, 5), (1, 3), (3, 5), -1, (1, 3), (3, 5)), ((2, 4), (2, 3), (3, 4), -1, (2, 3), (3, 4)),
        ((1, 5), (2, 4), (1, 2), (1, 4), (2, 5), (4, 5)),
        (1, (1, 2), (1, 4), (2, 5), (4, 5), (1, 5), (2, 4))),
    5: (((1, 5), (1, 4), (4, 5), -1, (1, 4), (4, 5)), ((2, 3), (2, 4), (3, 4), 1, (2, 4), (3, 4)),
        ((1, 5), (2, 3), (1, 2), (1, 3), (2, 5), (3, 5)),
        (1, (1, 2), (1, 3), (2, 5), (3, 5), (1, 5), (2, 3))),
    6: (((2, 4), (2, 5), (4, 5), 1, (2, 5), (4, 5)), ((1, 3), (1, 5), (3, 5), 1, (1, 5), (3, 5)),
        ((1, 3), (2, 4), (1, 2), (1, 4), (2, 3), (3, 4)),
        (-1, (1, 2), (1, 4), (2, 3), (3, 4), (2, 4), (1, 3))),
    7: (((3, 5), (1, 3), (1, 5), 1, (1, 3), (1, 5)), ((2, 4), (1, 4), (1, 2), 1, (1, 2), (1, 4)),
        ((2, 4), (3, 5), (2, 3), (2, 5), (3, 4), (4, 5)),
        (-1, (2, 3), (2, 5), (3, 4), (4, 5), (3, 5), (2, 4))),
    8: (((4, 5), (1, 4), (1, 5), 1, (1, 4), (1, 5)), ((2, 3), (1, 2), (1, 3), 1, (1, 2), (1, 3)),
        ((2, 3), (4, 5), (2, 4), (2, 5), (3, 4), (3, 5)),
        (1, (2, 4), (2, 5), (3, 4), (3, 5), (4, 5), (2, 3))),
    9: (((1, 4), (1, 5), (4, 5), 1, (1, 5), (4, 5)), ((2, 3), (2, 5), (3, 5), 1, (2, 5), (3, 5)),
        ((1, 4), (2, 3), (1, 2), (1, 3), (2, 4), (3, 4)),
        (1, (1, 2), (1, 3), (2, 4), (3, 4), (1, 4), (2, 3))),
    10: (((2, 5), (2, 4), (4, 5), -1, (2, 4), (4, 5)), ((1, 3), (1, 4), (3, 4), 1, (1, 4), (3, 4)),
         ((1, 3), (2, 5), (1, 2), (1, 5), (2, 3), (3, 5)),
         (-1, (1, 2), (1, 5), (2, 3), (3, 5), (2, 5), (1, 3))),
    11: (((2, 5), (2, 3), (3, 5), -1, (2, 3), (3, 5)), ((1, 4), (1, 3), (3, 4), -1, (1, 3), (3, 4)),
         ((1, 4), (2, 5), (1, 2), (1, 5), (2, 4), (4, 5)),
         (-1, (1, 2), (1, 5), (2, 4), (4, 5), (2, 5), (1, 4))),
    12: (((4, 5), (3, 4), (3, 5), 1, (3, 4), (3, 5)), ((1, 2), (1, 3), (2, 3), 1, (1, 3), (2, 3)),
         ((1, 2), (4, 5), (1, 4), (1, 5), (2, 4), (2, 5)),
         (1, (1, 4), (1, 5), (2, 4), (2, 5), (4, 5), (1, 2))),
    13: (((3, 5), (3, 4), (4, 5), -1, (3, 4), (4, 5)), ((1, 2), (1, 4), (2, 4), 1, (1, 4), (2, 4)),
         ((1, 2), (3, 5), (1, 3), (1, 5), (2, 3), (2, 5)),
         (1, (1, 3), (1, 5), (2, 3), (2, 5), (3, 5), (1, 2))),
    14: (((3, 5), (2, 3), (2, 5), 1, (2, 3), (2, 5)), ((1, 4), (1, 2), (2, 4), -1, (1, 2), (2, 4)),
         ((1, 4), (3, 5), (1, 3), (1, 5), (3, 4), (4, 5)),
         (-1, (1, 3), (1, 5), (3, 4), (4, 5), (3, 5), (1, 4))),
    15: (((4, 5), (2, 5), (2, 4), 1, (2, 4), (2, 5)), ((1, 3), (1, 2), (2, 3), -1, (1, 2), (2, 3)),
         ((1, 3), (4, 5), (1, 4), (1, 5), (3, 4), (3, 5)),
         (1, (1, 4), (1, 5), (3, 4), (3, 5), (4, 5), (1, 3))),
}

# Families whose closed forms are written with the roles of a and b
# exchanged relative to the builder arguments of their matrices.
SWAPPED_FACTOR_FAMILIES = frozenset({2, 3, 4, 5, 9})


@dataclass
class FactorCoefficients:
    """Coefficients of U t^2 + U' = 0, V t^2 + V' = 0, W t^4 + W' t^2 + W'' = 0."""

    k: int
    U: object
    U_prime: object
    V: object
    V_prime: object
    W: object
    W_second: object
    W_prime: float | None = None

    def quadratic_roots(self) -> tuple[complex, complex]:
        return (np.sqrt(complex(-self.U_prime / self.U)),
                np.sqrt(complex(-self.V_prime / self.V)))

    def quartic_product(self) -> float:
        """t1^2 t2^2 for the quartic roots t1, t2."""
        return float(self.W_second / self.W)

    def to_json(self) -> dict:
        return {"k": self.k, "U": float(self.U), "U'": float(self.U_prime),
                "V": float(self.V), "V'": float(self.V_prime), "W": float(self.W),
                "W'": self.W_prime, "W''": float(self.W_second)}


def factor_coefficients(k: int, a, b, J: InertiaSpec, recover_w_prime: bool = True
                        ) -> FactorCoefficients:
    """Closed-form factor coefficients at builder(a, b) of t_k.

    Arithmetic follows the types of ``a``, ``b`` and ``J.lambdas``, so
    integer or Fraction inputs give exact values.  W' has no closed form; it
    is recovered from the numerical quartic roots as -W (t1^2 + t2^2).
    """
    J.require_dim(5)
    J.require_ordered()
    if k not in _FACTORS:
        raise So5Error(f"family index must be 1..15, got {k!r}")
    if k in SWAPPED_FACTOR_FAMILIES:
        a, b = b, a
    lam = J.lambdas
    s = lambda p: lam[p[0] - 1] + lam[p[1] - 1]  # noqa: E731
    d = lambda p: lam[p[0] - 1] - lam[p[1] - 1]  # noqa: E731
    u, v, w, w2 = _FACTORS[k]
    out = FactorCoefficients(
        k=k,
        U=s(u[0]) ** 2 * s(u[1]) * s(u[2]),
        U_prime=u[3] * b * b * d(u[4]) * d(u[5]),
        V=s(v[0]) ** 2 * s(v[1]) * s(v[2]),
        V_prime=v[3] * a * a * d(v[4]) * d(v[5]),
        W=s(w[0]) ** 4 * s(w[1]) ** 4 * s(w[2]) * s(w[3]) * s(w[4]) * s(w[5]),
        W_second=(w2[0] * d(w2[1]) * d(w2[2]) * d(w2[3]) * d(w2[4])
                  * (a * a * s(w2[5]) ** 2 - b * b * s(w2[6]) ** 2) ** 2),
    )
    if recover_w_prime:
        if k in SWAPPED_FACTOR_FAMILIES:
            a, b = b, a
        M = CARTAN_FAMILIES[k].builder(float(a), float(b))
        ev = _restricted_eigenvalues(M, J)[0]
        _, quartic = _match_factors(ev, out)
        out.W_prime = float(-float(out.W) * np.sum(quartic ** 2).real / 2)
    return out


def _match_factors(ev: np.ndarray, fc: FactorCoefficients):
    """Pair eigenvalues with +-quadratic roots; return (errors, remaining quartic roots)."""
    rem = list(ev)
    errs = []
    for r in fc.quadratic_roots():
        for root in (r, -r):
            i = int(np.argmin(np.abs(np.array(rem) - root)))
            errs.append(abs(rem[i] - root) / max(abs(root), 1e-300))
            rem.pop(i)
    return errs, np.array(rem)


# ---------------------------------------------------------------------------
# Restricted spectrum
# ---------------------------------------------------------------------------

@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    pairing_residual: float
    norm: float
    factor_match: dict = field(default_factory=dict)

    @property
    def max_real(self) -> float:
        return float(np.max(self.eigenvalues.real))

    @property
    def spectral_tol(self) -> float:
        return 1e-8 * self.norm

    def leading_eigenvalue(self) -> complex:
        return complex(self.eigenvalues[int(np.argmax(self.eigenvalues.real))])


def _restricted_eigenvalues(M, J: InertiaSpec, P=None):
    c = as_coords(M)
    if P is None:
        P = tangent_projector(c)
    A = P.T @ rhs_jacobian_coords(c, J) @ P
    return np.linalg.eigvals(A), A, P


def _pairing_residual(ev: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(ev))))
    return float(max(np.min(np.abs(ev + e)) for e in ev)) / scale


def restricted_spectrum(eq, J: InertiaSpec) -> SpectrumReport:
    """Eigenvalues of the Jacobian restricted to the orbit tangent space.

    For Cartan-slot points the eigenvalues are also matched against the
    closed-form factors; ``factor_match`` holds relative errors of the four
    quadratic roots and of the quartic root product t1^2 t2^2 = W''/W.
    """
    M = eq.matrix if isinstance(eq, EquilibriumPoint) else eq
    J.require_dim(5)
    ev, A, _ = _restricted_eigenvalues(M, J)
    order = np.lexsort((ev.imag, ev.real))
    ev = ev[order]
    report = SpectrumReport(ev, _pairing_residual(ev), float(np.linalg.norm(A, 2)))
    if isinstance(eq, EquilibriumPoint) and isinstance(eq.provenance, CartanSlot) \
            and J.is_ordered():
        p, q = cartan_args(eq)
        fc = factor_coefficients(eq.provenance.k, p, q, J, recover_w_prime=False)
        errs, quartic = _match_factors(ev, fc)
        target = fc.quartic_product()
        prod = complex(np.prod(quartic))
        scale = max(abs(target), 1e-300)
        report.factor_match = {
            "quadratic_U": max(errs[:2]),
            "quadratic_V": max(errs[2:]),
            "quartic_product": abs(prod - target) / scale,
            "W_prime": float(-float(fc.W) * np.sum(quartic ** 2).real / 2),
        }
    return report


def unstable_direction(eq, J: InertiaSpec) -> tuple[complex, SkewMatrix]:
    """Leading eigenvalue of the restricted Jacobian and a unit tangent direction.

    The direction is the real part of the eigenvector (or the imaginary part
    when that is larger), lifted back to so(5).
    """
    M = eq.matrix if isinstance(eq, EquilibriumPoint) else eq
    ev, A, P = _restricted_eigenvalues(M, J)
    w, V = np.linalg.eig(A)
    i = int(np.argmax(w.real))
    v = V[:, i]
    v = v.real if np.linalg.norm(v.real) >= np.linalg.norm(v.imag) else v.imag
    d = P @ v
    return complex(w[i]), coords_to_matrix(d / np.linalg.norm(d))


# ---------------------------------------------------------------------------
# Special condition for t6 / t7
# ---------------------------------------------------------------------------

_SPECIAL_SUMS = {6: ((2, 4), (1, 3)), 7: ((2, 4), (3, 5))}


def special_condition(k: int, inv: OrbitInvariants, J: InertiaSpec, rel_tol=1e-12) -> bool:
    """c1^2 (s1^4 + s2^4) != c2 (s1^2 + s2^2)^2 for the family's pair of sums."""
    if k not in _SPECIAL_SUMS:
        raise So5Error(f"special condition is defined for families 6 and 7 only, got {k}")
    inv.require_regular()
    lam = J.lambdas
    s1, s2 = (lam[i - 1] + lam[j - 1] for i, j in _SPECIAL_SUMS[k])
    lhs = inv.c1 ** 2 * (s1 ** 4 + s2 ** 4)
    rhs = inv.c2 * (s1 ** 2 + s2 ** 2) ** 2
    return abs(lhs - rhs) > rel_tol * max(abs(lhs), abs(rhs))


# ---------------------------------------------------------------------------
# Energy-Casimir method
# ---------------------------------------------------------------------------

_COMBO_RE = re.compile(r"^\s*([+-]?)\s*F([1-5])((?:\s*[+-]\s*F[1-5])*)\s*$")


def parse_combo(combo) -> tuple[tuple[int, int], ...]:
    """'F1-F4' -> ((1, 1), (4, -1)).  Tuples of (index, sign) pass through."""
    if not isinstance(combo, str):
        return tuple((int(i), int(s)) for i, s in combo)
    m = _COMBO_RE.match(combo)
    if not m:
        raise So5Error(f"cannot parse combination {combo!r}; expected e.g. 'F1+F5'")
    terms = [(int(m.group(2)), -1 if m.group(1) == "-" else 1)]
    for sign, idx in re.findall(r"([+-])\s*F([1-5])", m.group(3)):
        terms.append((int(idx), -1 if sign == "-" else 1))
    return tuple(terms)


def format_combo(terms) -> str:
    out = ""
    for i, s in terms:
        out += ("-" if s < 0 else ("+" if out else "")) + f"F{i}"
    return out


def generator_hessian(i: int, J: InertiaSpec) -> np.ndarray:
    """Constant coordinate Hessian of F_i (diagonal; F_i is a sum of squares)."""
    sq = J.array ** 2
    d = np.zeros(10)
    for k, ((p, q), _) in enumerate(COORD_ENTRIES):
        if i - 1 in (p, q):
            other = q if p == i - 1 else p
            d[k] = 2.0 / (sq[i - 1] - sq[other])
    return np.diag(d)


def casimir2_hessian(c) -> np.ndarray:
    """Hessian of Tr(M^4)/8: entry (p, q) = [Tr(Ep Eq M^2) + Tr(Eq Ep M^2) + Tr(Ep M Eq M)] / 2."""
    A = coords_to_full(as_coords(c))
    E = coords_to_full(np.eye(10))
    A2 = A @ A
    EA2 = np.einsum("pij,jk->pik", E, A2)
    EA = np.einsum("pij,jk->pik", E, A)
    t1 = np.einsum("pij,qji->pq", E, EA2)
    t2 = np.einsum("pij,qji->pq", EA, EA)
    return 0.5 * (t1 + t1.T + t2)


@dataclass
class ArnoldResult:
    combo: str
    m: float
    n: float
    gradient_residual: float
    hessian_eigenvalues: np.ndarray
    minors: list | None
    definiteness: str

    @property
    def definite(self) -> bool:
        return self.definiteness in ("negative", "positive")

    @property
    def minor_signs(self) -> str | None:
        if self.minors is None:
            return None
        return "".join("+" if x > 0 else ("-" if x < 0 else "0") for x in self.minors)

    def to_json(self) -> dict:
        return {"combo": self.combo, "m": self.m, "n": self.n,
                "gradient_residual": self.gradient_residual,
                "definiteness": self.definiteness,
                "minors": self.minors,
                "minor_signs": self.minor_signs,
                "hessian_eigenvalues": self.hessian_eigenvalues}


def arnold_test(eq, J: InertiaSpec, combo, margin: float = 1e-10) -> ArnoldResult:
    """Energy-Casimir test of G = sum(+-F_i) + m C1 + n C2 at an equilibrium.

    (m, n) solve dG = 0.  Definiteness is read off the eigenvalues of the
    Hessian restricted to the orbit tangent space.  For Cartan points the
    leading principal minors D1..D8 are also reported, in coordinate order
    with the two Cartan coordinates removed.
    """
    J.require_dim(5)
    terms = parse_combo(combo)
    M = eq.matrix if isinstance(eq, EquilibriumPoint) else eq
    c = as_coords(M)
    HF = sum(s * generator_hessian(i, J) for i, s in terms)
    gF = HF @ c
    G = _casimir_gradients(c).T
    sv = np.linalg.svd(G, compute_uv=False)
    if sv[0] == 0 or sv[1] <= 1e-10 * sv[0]:
        raise DegeneratePointError("dC1, dC2 dependent: the (m, n) system is singular")
    (m, n), *_ = np.linalg.lstsq(G, -gF, rcond=None)
    residual = float(np.linalg.norm(G @ [m, n] + gF))
    H = HF + m * np.eye(10) + n * casimir2_hessian(c)
    minors = None
    if isinstance(eq, EquilibriumPoint) and isinstance(eq.provenance, CartanSlot):
        P, idx = _cartan_tangent(eq)
        Hw = H[np.ix_(idx, idx)]
        minors = [float(np.linalg.det(Hw[:r, :r])) for r in range(1, 9)]
    else:
        P = tangent_projector(c)
    Hs = P.T @ H @ P
    w = np.linalg.eigvalsh(0.5 * (Hs + Hs.T))
    gate = margin * max(float(np.max(np.abs(w))), 1e-300)
    if np.all(w < -gate):
        kind = "negative"
    elif np.all(w > gate):
        kind = "positive"
    else:
        kind = "indefinite"
    return ArnoldResult(format_combo(terms), float(m), float(n), residual, w, minors, kind)


# (family, slot class) -> (listed combination, verified substitutes)
ARNOLD_TABLE = {
    (1, "ab"): ("F1+F5", ()),
    (1, "ba"): ("F4+F5", ("F4-F5",)),
    (2, "ab"): ("F1-F4", ()),
    (8, "ab"): ("F1+F5", ("F1-F2",)),
    (8, "ba"): ("F1+F2", ("F1+F5",)),
    (9, "ba"): ("F4-F5", ("F3+F4",)),
    (12, "ab"): ("F1-F3", ("F2+F3",)),
    (12, "ba"): ("F3-F5", ("F3+F4",)),
}

OPEN_CASES = frozenset({(2, "ba"), (9, "ab")})


# ---------------------------------------------------------------------------
# Classifier
# ---------------------------------------------------------------------------

@dataclass
class StabilityVerdict:
    k: int
    slot: str
    status: str
    evidence: dict
    spectrum: SpectrumReport
    arnold: ArnoldResult | None = None

    def to_json(self) -> dict:
        return {
            "family": self.k,
            "slot": self.slot,
            "status": self.status,
            "evidence": self.evidence,
            "spectrum": [complex(z) for z in self.spectrum.eigenvalues],
            "arnold": None if self.arnold is None else self.arnold.to_json(),
        }


def classify_equilibrium(eq: EquilibriumPoint, J: InertiaSpec,
                         inv: OrbitInvariants | None = None) -> StabilityVerdict:
    """Spectrum first, then the energy-Casimir table, then the open cases."""
    if not isinstance(eq, EquilibriumPoint) or not isinstance(eq.provenance, CartanSlot):
        raise So5Error("only Cartan-slot equilibria can be classified; "
                       "continuous-family points are outside this classifier")
    J.require_dim(5)
    J.require_ordered()
    inv = OrbitInvariants(*casimirs(eq.matrix)) if inv is None else inv
    inv.require_regular()
    k, slot = eq.provenance.k, eq.provenance.slot
    cls = slot_class(slot)
    spec = restricted_spectrum(eq, J)

    if spec.max_real > spec.spectral_tol:
        lead = spec.leading_eigenvalue()
        return StabilityVerdict(k, slot, UNSTABLE, {
            "kind": "PositiveRealEigenvalue", "value": lead,
            "spectral_tol": spec.spectral_tol}, spec)

    listed = ARNOLD_TABLE.get((k, cls))
    if listed is not None:
        printed, substitutes = listed
        printed_result = None
        for combo in (printed,) + substitutes:
            res = arnold_test(eq, J, combo)
            if printed_result is None:
                printed_result = res
            if res.definite:
                kind = ("NegativeDefiniteHessian" if res.definiteness == "negative"
                        else "PositiveDefiniteHessian")
                return StabilityVerdict(k, slot, STABLE, {
                    "kind": kind, "combo": res.combo, "minor_signs": res.minor_signs,
                    "listed_combo": printed,
                    "listed_combo_definite": printed_result.definite}, spec, res)

    if (k, cls) in OPEN_CASES:
        return StabilityVerdict(k, slot, OPEN, {"kind": "OpenCase", "note": OPEN_NOTE}, spec)
    if k in (6, 7) and cls == "ab" and not special_condition(k, inv, J):
        return StabilityVerdict(k, slot, OPEN, {
            "kind": "OpenCase",
            "note": "special condition fails; instability is only established when it holds"},
            spec)
    return StabilityVerdict(k, slot, OPEN, {
        "kind": "OpenCase", "flagged": True,
        "note": "marginal spectrum and no listed energy-Casimir combination is definite"}, spec)


def expected_classification(inv: OrbitInvariants, J: InertiaSpec) -> dict:
    """Reference status per (family, slot class); t6/t7 (a,b) depend on the special condition."""
    table = {}
    for k in range(1, 16):
        for cls in ("ab", "ba"):
            if k in (3, 4, 5, 10, 11, 13, 14, 15):
                status = UNSTABLE
            elif k in (6, 7):
                if cls == "ba" or special_condition(k, inv, J):
                    status = UNSTABLE
                else:
                    status = OPEN
            elif k in (1, 8, 12):
                status = STABLE
            elif (k, cls) in ((2, "ab"), (9, "ba")):
                status = STABLE
            else:
                status = OPEN
            table[(k, cls)] = status
    return table


def classify_table(J: InertiaSpec, inv: OrbitInvariants, families=None) -> list[dict]:
    """30 rows (15 families x 2 slot classes); each row classifies its four slots."""
    rows = []
    for k in range(1, 16):
        if families is not None and k not in families:
            continue
        for cls in ("ab", "ba"):
            verdicts = [classify_equilibrium(cartan_point(k, s, inv), J, inv)
                        for s in SLOTS if slot_class(s) == cls]
            statuses = {v.status for v in verdicts}
            rep = verdicts[0]
            rows.append({
                "family": k,
                "slot_class": "a,b" if cls == "ab" else "b,a",
                "status": rep.status if len(statuses) == 1 else "Mixed",
                "slots": {v.slot: v.status for v in verdicts},
                "verdict": rep.to_json(),
            })
    return rows
