"""Randomized identity checks shared by the `verify` command and the tests."""

from __future__ import annotations

import numpy as np

from .invariants import (
    casimirs,
    casimirs_expanded,
    generator_integrals,
    integral_gradients,
    load_manakov_identification,
    manakov_expansion,
    manakov_k1,
    manakov_k2,
    manakov_k3,
    mishchenko_integral,
    trace_power_form,
    QUADRATIC_FEATURES,
    QUARTIC_FEATURES,
)
from .lie_core import (
    BASIS,
    BRACKET_TABLE,
    SkewMatrix,
    as_coords,
    bracket,
    grad_casimir1,
    grad_casimir2,
    grad_hamiltonian,
    hamiltonian,
    hamiltonian_trace,
    poisson_tensor,
    random_inertia,
    random_skew,
    rhs_coords,
    rhs_jacobian_coords,
    rigid_body_rhs,
)

SUITES = ("generator-identity", "poisson-commutation", "two-path", "bracket-table")


def _result(passed, samples, max_error, tol, **extra):
    out = {"passed": bool(passed), "samples": int(samples), "max_error": float(max_error),
           "tolerance": tol}
    out.update(extra)
    return out


def generator_identity(rng, samples=200, dims=(4, 5, 6, 7, 8), tol=1e-10) -> dict:
    """|m_r - sum_i lambda_i^r F_i| <= tol (1 + |m_r|) for r = 1..n."""
    worst = 0.0
    per_n = {}
    for n in dims:
        w_n = 0.0
        for _ in range(samples):
            J = random_inertia(n, rng, ordered=False)
            M = random_skew(n, rng, rng.uniform(0.5, 3.0))
            F = generator_integrals(M, J)
            for r in range(1, n + 1):
                m = mishchenko_integral(M, J, r)
                w_n = max(w_n, abs(m - float(np.sum(J.array ** r * F))) / (1 + abs(m)))
        per_n[str(n)] = w_n
        worst = max(worst, w_n)
    return _result(worst <= tol, samples * len(dims), worst, tol, per_n=per_n)


def poisson_commutation(rng, samples=100, tol=1e-10) -> dict:
    """{F, G} = grad F . Gamma grad G vanishes for all pairs of H, C1, C2, K1, K2, K3."""
    worst = 0.0
    for _ in range(samples):
        J = random_inertia(5, rng)
        c = as_coords(random_skew(5, rng, rng.uniform(0.5, 2.0)))
        P = poisson_tensor(c)
        g = integral_gradients(c, J)
        names = list(g)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                scale = 1 + np.linalg.norm(g[a]) * np.linalg.norm(g[b]) * np.linalg.norm(c)
                worst = max(worst, abs(g[a] @ P @ g[b]) / scale)
    return _result(worst <= tol, samples, worst, tol)


def _rel(x, y):
    return abs(x - y) / (1 + max(abs(x), abs(y)))


def two_path(rng, samples=100, tol=1e-10) -> dict:
    """Independent formulas for the same quantity agree."""
    checks = {k: 0.0 for k in (
        "hamiltonian", "casimirs", "rhs", "poisson_rhs", "casimir_kernel", "K1_trace",
        "K2_trace", "K3_trace", "jacobian", "manakov_fixture")}
    fixture = load_manakov_identification()
    feats = {**QUADRATIC_FEATURES, **QUARTIC_FEATURES}
    for _ in range(samples):
        J = random_inertia(5, rng)
        M = random_skew(5, rng, rng.uniform(0.5, 2.0))
        c = as_coords(M)
        scale = 1 + np.linalg.norm(c) ** 2
        checks["hamiltonian"] = max(checks["hamiltonian"],
                                    _rel(hamiltonian(M, J), hamiltonian_trace(M, J)))
        for x, y in zip(casimirs(M), casimirs_expanded(c)):
            checks["casimirs"] = max(checks["casimirs"], _rel(x, y))
        r1 = rhs_coords(c, J)
        checks["rhs"] = max(checks["rhs"], np.max(np.abs(r1 - as_coords(rigid_body_rhs(M, J)))) / scale)
        P = poisson_tensor(c)
        checks["poisson_rhs"] = max(checks["poisson_rhs"],
                                    np.max(np.abs(P @ grad_hamiltonian(c, J) - r1)) / scale)
        checks["casimir_kernel"] = max(
            checks["casimir_kernel"],
            np.max(np.abs(P @ grad_casimir1(c))) / scale,
            np.max(np.abs(P @ grad_casimir2(c))) / scale ** 2)
        checks["K1_trace"] = max(checks["K1_trace"], _rel(manakov_k1(M, J), trace_power_form(M, J, 3)))
        checks["K2_trace"] = max(checks["K2_trace"], _rel(manakov_k2(M, J), trace_power_form(M, J, 5)))
        A = M.full()
        k3 = float(np.trace(np.diag(J.array ** 2) @ np.linalg.matrix_power(A, 4))) / 10
        checks["K3_trace"] = max(checks["K3_trace"], _rel(manakov_k3(M, J), k3))
        h = 1e-6
        fd = np.array([(rhs_coords(c + h * e, J) - rhs_coords(c - h * e, J)) / (2 * h)
                       for e in np.eye(10)]).T
        checks["jacobian"] = max(checks["jacobian"],
                                 np.max(np.abs(fd - rhs_jacobian_coords(c, J))))
        for entry in fixture["entries"]:
            coef = manakov_expansion(M, J, entry["order"])[entry["gamma_power"]]
            pred = entry["constant"] + sum(v * feats[name](M, J)
                                           for name, v in entry["coefficients"].items())
            checks["manakov_fixture"] = max(checks["manakov_fixture"], _rel(coef, pred))
    # central differences carry O(h^2) truncation and O(eps/h) rounding error
    tols = {k: (1e-6 if k == "jacobian" else tol) for k in checks}
    failed = sorted(k for k in checks if not checks[k] <= tols[k])
    # max_error here is the worst error-to-tolerance ratio across checks
    ratio = max(checks[k] / tols[k] for k in checks)
    return _result(not failed, samples, ratio, 1.0, checks=checks, tolerances=tols,
                   failed=failed)


def bracket_table(rng=None, samples=None, tol=0.0) -> dict:
    """Every [E_i, E_j] equals the tabulated +-E_k or 0, exactly; the table is antisymmetric."""
    bad = []
    for i in range(10):
        for j in range(10):
            t = BRACKET_TABLE[i][j]
            expect = SkewMatrix.zeros(5) if t == 0 else (1 if t > 0 else -1) * BASIS[abs(t) - 1]
            if bracket(BASIS[i], BASIS[j]) != expect or BRACKET_TABLE[j][i] != -t:
                bad.append([i + 1, j + 1])
    return _result(not bad, 100, float(len(bad)), tol, mismatches=bad)


def run_suites(names, rng, samples=None, n=None) -> dict:
    out = {}
    for name in names:
        if name == "generator-identity":
            kw = {}
            if samples is not None:
                kw["samples"] = samples
            if n is not None:
                kw["dims"] = (n,)
            out[name] = generator_identity(rng, **kw)
        elif name == "poisson-commutation":
            out[name] = poisson_commutation(rng, **({} if samples is None else {"samples": samples}))
        elif name == "two-path":
            out[name] = two_path(rng, **({} if samples is None else {"samples": samples}))
        elif name == "bracket-table":
            out[name] = bracket_table()
        else:
            raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    return out
