import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from so5body.errors import So5Error
from so5body.invariants import (
    QUADRATIC_FEATURES,
    QUARTIC_FEATURES,
    casimir1,
    casimir2,
    casimirs,
    casimirs_expanded,
    generator_integral,
    generator_integrals,
    identify_expansion_coefficient,
    integral_gradients,
    integral_snapshot,
    load_manakov_identification,
    manakov_expansion,
    manakov_k1,
    manakov_k2,
    manakov_k3,
    mishchenko_integral,
    trace_power_form,
    tracked_integrals,
)
from so5body.lie_core import (
    COORD_NAMES,
    InertiaSpec,
    SkewMatrix,
    as_coords,
    coords_to_matrix,
    finite_difference_gradient,
    hamiltonian,
    poisson_tensor,
    random_inertia,
    random_skew,
)

coords10 = st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False), min_size=10, max_size=10)


def _expansion(entries, J):
    """Exact F_i coordinate expansion from (coord, k) pairs: sum c^2 / (lambda_i^2 - lambda_k^2)."""
    lam = J.array

    def f(i, c):
        named = dict(zip(COORD_NAMES, as_coords(c)))
        return sum(named[name] ** 2 / (lam[i - 1] ** 2 - lam[k - 1] ** 2) for name, k in entries)
    return f


class TestCasimirs:
    def test_zero(self):
        assert casimirs(SkewMatrix.zeros(5)) == (0.0, 0.0)

    def test_t1_point(self):
        M = coords_to_matrix([0, 0, -2, 0, 0, 1, 0, 0, 0, 0])
        # C1 = (a^2 + b^2)/2, C2 = (a^4 + b^4)/4 at a Cartan point
        assert casimirs(M) == pytest.approx((2.5, 4.25), rel=1e-15)

    @given(coords10)
    def test_expanded_polynomials(self, c):
        M = coords_to_matrix(c)
        exp = casimirs_expanded(c)
        assert casimir1(M) == pytest.approx(exp[0], rel=1e-12, abs=1e-12)
        assert casimir2(M) == pytest.approx(exp[1], rel=1e-12, abs=1e-12)

    def test_c1_is_half_norm_squared(self, rng):
        M = random_skew(5, rng, 1.7)
        assert casimir1(M) == pytest.approx(0.5 * 1.7 ** 2)

    def test_conserved_along_flow(self, rng, J_ref):
        from so5body.lie_core import rhs_coords
        for _ in range(50):
            c = as_coords(random_skew(5, rng))
            g = integral_gradients(c, J_ref)
            v = rhs_coords(c, J_ref)
            assert abs(g["C1"] @ v) <= 1e-13
            assert abs(g["C2"] @ v) <= 1e-13

    def test_wrong_dimension(self, rng):
        with pytest.raises(So5Error):
            casimirs(random_skew(4, rng))


class TestGeneratorIntegrals:
    def test_expansion_fixture(self, rng, generator_expansions):
        J = random_inertia(5, rng)
        for _ in range(50):
            M = random_skew(5, rng)
            F = generator_integrals(M, J)
            for i in range(1, 6):
                expect = _expansion(generator_expansions[f"F{i}"], J)(i, M)
                assert F[i - 1] == pytest.approx(expect, rel=1e-12, abs=1e-14)

    def test_fixture_covers_each_coordinate_twice(self, generator_expansions):
        counts = {name: 0 for name in COORD_NAMES}
        for i in range(1, 6):
            for name, _ in generator_expansions[f"F{i}"]:
                counts[name] += 1
        # every m_ij enters F_i and F_j
        assert set(counts.values()) == {2}

    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
    def test_generator_identity(self, rng, n):
        for _ in range(200):
            J = random_inertia(n, rng, ordered=False)
            M = random_skew(n, rng, rng.uniform(0.5, 3))
            F = generator_integrals(M, J)
            for r in range(1, n + 1):
                m = mishchenko_integral(M, J, r)
                assert abs(m - float(np.sum(J.array ** r * F))) <= 1e-10 * (1 + abs(m))

    def test_sum_is_zero_weighted(self, rng):
        # r = 0: sum_i F_i = m_0 = sum (1 - 1)/(...) m^2 = 0
        J = random_inertia(6, rng)
        M = random_skew(6, rng)
        assert abs(np.sum(generator_integrals(M, J))) <= 1e-12

    def test_m1_is_twice_hamiltonian(self, rng):
        J = random_inertia(5, rng)
        M = random_skew(5, rng)
        # (lambda_i - lambda_k)/(lambda_i^2 - lambda_k^2) = 1/(lambda_i + lambda_k)
        assert mishchenko_integral(M, J, 1) == pytest.approx(2 * hamiltonian(M, J), rel=1e-13)

    def test_m2_is_twice_c1(self, rng):
        J = random_inertia(5, rng)
        M = random_skew(5, rng)
        assert mishchenko_integral(M, J, 2) == pytest.approx(2 * casimir1(M), rel=1e-13)

    def test_single_index(self, rng, J_ref):
        M = random_skew(5, rng)
        assert generator_integral(M, J_ref, 3) == generator_integrals(M, J_ref)[2]
        with pytest.raises(IndexError):
            generator_integral(M, J_ref, 6)

    def test_bad_order(self, rng, J_ref):
        with pytest.raises(So5Error):
            mishchenko_integral(random_skew(5, rng), J_ref, 0)

    def test_poisson_commute(self, rng):
        J = random_inertia(5, rng)
        for _ in range(20):
            c = as_coords(random_skew(5, rng))
            P = poisson_tensor(c)
            grads = [finite_difference_gradient(
                lambda x, i=i: generator_integrals(coords_to_matrix(x), J)[i], c) for i in range(5)]
            for i in range(5):
                for j in range(i + 1, 5):
                    assert abs(grads[i] @ P @ grads[j]) <= 1e-6


class TestManakovIntegrals:
    def test_k1_trace_form(self, rng):
        for _ in range(50):
            J = random_inertia(5, rng)
            M = random_skew(5, rng)
            assert manakov_k1(M, J) == pytest.approx(trace_power_form(M, J, 3), rel=1e-12)

    def test_k2_trace_form(self, rng):
        for _ in range(50):
            J = random_inertia(5, rng)
            M = random_skew(5, rng)
            assert manakov_k2(M, J) == pytest.approx(trace_power_form(M, J, 5), rel=1e-12)

    def test_k3_trace_identity(self, rng):
        for _ in range(50):
            J = random_inertia(5, rng)
            M = random_skew(5, rng)
            A = M.full()
            expect = np.trace(np.diag(J.array ** 2) @ np.linalg.matrix_power(A, 4)) / 10
            assert manakov_k3(M, J) == pytest.approx(expect, rel=1e-12)

    def test_trace_form_low_powers(self, rng, J_ref):
        M = random_skew(5, rng)
        assert trace_power_form(M, J_ref, 0) == pytest.approx(hamiltonian(M, J_ref), rel=1e-13)
        assert trace_power_form(M, J_ref, 1) == pytest.approx(casimir1(M), rel=1e-13)

    def test_gradients_finite_difference(self, rng):
        J = random_inertia(5, rng)
        fns = {
            "H": hamiltonian, "C1": lambda M, J: casimir1(M), "C2": lambda M, J: casimir2(M),
            "K1": manakov_k1, "K2": manakov_k2, "K3": manakov_k3,
        }
        for _ in range(5):
            c = as_coords(random_skew(5, rng))
            g = integral_gradients(c, J)
            for name, f in fns.items():
                fd = finite_difference_gradient(lambda x: f(coords_to_matrix(x), J), c)
                assert np.max(np.abs(fd - g[name])) <= 1e-6 * (1 + np.max(np.abs(g[name]))), name

    def test_all_pairs_commute(self, rng):
        for _ in range(100):
            J = random_inertia(5, rng)
            c = as_coords(random_skew(5, rng, rng.uniform(0.5, 2)))
            P = poisson_tensor(c)
            g = integral_gradients(c, J)
            names = list(g)
            for i, a in enumerate(names):
                for b in names[i + 1:]:
                    scale = 1 + np.linalg.norm(g[a]) * np.linalg.norm(g[b]) * np.linalg.norm(c)
                    assert abs(g[a] @ P @ g[b]) <= 1e-10 * scale, (a, b)

    def test_independent_at_random_state(self, rng):
        J = random_inertia(5, rng)
        c = as_coords(random_skew(5, rng))
        G = np.array(list(integral_gradients(c, J).values()))
        assert np.linalg.matrix_rank(G, tol=1e-8) == 6


class TestExpansion:
    def test_top_coefficient_is_constant(self, rng, J_ref):
        M = random_skew(5, rng)
        for r in (2, 3, 4, 5):
            top = manakov_expansion(M, J_ref, r)[r]
            assert top == pytest.approx(np.sum(J_ref.array ** (2 * r)) / (2 * r))

    def test_odd_degree_vanishes(self, rng, J_ref):
        M = random_skew(5, rng)
        for r in (2, 3, 4, 5):
            coef = manakov_expansion(M, J_ref, r)
            for p in range(r + 1):
                if (r - p) % 2:
                    assert abs(coef[p]) <= 1e-12

    def test_fixture_reproduces(self):
        data = load_manakov_identification()
        J = InertiaSpec(tuple(data["lambdas"]))
        rng = np.random.default_rng(data["seed"])
        for entry in data["entries"]:
            coeffs, const, resid = identify_expansion_coefficient(
                J, entry["order"], entry["gamma_power"], rng, data["samples"])
            assert resid <= 1e-12
            for name, v in entry["coefficients"].items():
                assert coeffs[name] == pytest.approx(v, abs=1e-9)
            assert abs(const) <= 1e-9

    def test_fixture_schema(self):
        data = load_manakov_identification()
        assert data["version"] == 1
        got = {(e["order"], e["gamma_power"]) for e in data["entries"]}
        assert got == {(2, 0), (3, 1), (4, 0), (4, 2), (5, 1), (5, 3)}
        feats = set(QUADRATIC_FEATURES) | set(QUARTIC_FEATURES)
        for e in data["entries"]:
            assert set(e["coefficients"]) <= feats

    def test_fixture_holds_at_other_inertia(self, rng):
        data = load_manakov_identification()
        feats = {**QUADRATIC_FEATURES, **QUARTIC_FEATURES}
        for _ in range(30):
            J = random_inertia(5, rng)
            M = random_skew(5, rng)
            for e in data["entries"]:
                coef = manakov_expansion(M, J, e["order"])[e["gamma_power"]]
                pred = e["constant"] + sum(v * feats[n](M, J) for n, v in e["coefficients"].items())
                assert coef == pytest.approx(pred, rel=1e-10, abs=1e-12)

    def test_bad_order(self, rng, J_ref):
        with pytest.raises(So5Error):
            manakov_expansion(random_skew(5, rng), J_ref, 6)

    def test_odd_identification_rejected(self, rng, J_ref):
        with pytest.raises(So5Error, match="odd"):
            identify_expansion_coefficient(J_ref, 3, 0, rng)


class TestSnapshot:
    def test_schema(self, rng, J_ref):
        snap = integral_snapshot(random_skew(5, rng), J_ref)
        assert set(snap) == {"H", "C1", "C2", "K1", "K2", "K3", "F", "m"}
        assert len(snap["F"]) == 5 and len(snap["m"]) == 5
        json.dumps(snap)

    def test_tracked_matches_scalar(self, rng, J_ref):
        C = np.array([as_coords(random_skew(5, rng)) for _ in range(7)])
        T = tracked_integrals(C, J_ref)
        for row, c in enumerate(C):
            M = coords_to_matrix(c)
            snap = integral_snapshot(M, J_ref)
            for name in ("H", "C1", "C2", "K1", "K2", "K3"):
                assert T[name][row] == pytest.approx(snap[name], rel=1e-12, abs=1e-14)
            for i in range(5):
                assert T[f"F{i + 1}"][row] == pytest.approx(snap["F"][i], rel=1e-12, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(coords10, st.floats(min_value=0.1, max_value=3))
def test_homogeneity(c, s):
    J = InertiaSpec((5, 4, 3, 2, 1))
    M = coords_to_matrix(c)
    sM = coords_to_matrix(np.array(c) * s)
    assert manakov_k1(sM, J) == pytest.approx(s ** 2 * manakov_k1(M, J), rel=1e-12, abs=1e-12)
    assert manakov_k3(sM, J) == pytest.approx(s ** 4 * manakov_k3(M, J), rel=1e-11, abs=1e-11)
