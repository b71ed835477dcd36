import warnings

import numpy as np
import pytest

from so5body.dynamics import (
    TRACKED,
    Trajectory,
    conservation_report,
    drift,
    integrate,
    integrate_ensemble,
    max_deviation,
    project_to_orbit,
    read_csv,
    write_csv,
)
from so5body.equilibria import cartan_point
from so5body.errors import IntegrationError, So5Error
from so5body.invariants import casimirs, tracked_integrals
from so5body.lie_core import (
    COORD_NAMES,
    InertiaSpec,
    as_coords,
    coords_to_matrix,
    random_skew,
)
from so5body.stability import classify_equilibrium, unstable_direction, UNSTABLE, STABLE


def _growth_time(eq, J, eps):
    """Integrate from eq + eps * unstable direction for T = 5 / Re(lambda); return max growth."""
    lam, d = unstable_direction(eq, J)
    T = 5 / lam.real
    dt = min(1e-2, T / 2000)
    traj = integrate(eq.matrix + eps * d, J, dt, int(np.ceil(T / dt)))
    return float(np.max(max_deviation(traj, eq.matrix)) / eps)


class TestIntegrate:
    def test_equilibrium_constant(self, J_ref, inv_ref):
        M0 = cartan_point(1, "a,b", inv_ref).matrix
        traj = integrate(M0, J_ref, 1e-3, 10_000, stride=100)
        assert np.max(max_deviation(traj, M0)) <= 1e-12
        assert max(conservation_report(traj, J_ref).values()) <= 1e-14

    def test_random_conservation(self, rng, J_ref):
        M0 = random_skew(5, rng, 1.0)
        traj = integrate(M0, J_ref, 1e-3, 10_000, stride=10)
        rep = conservation_report(traj, J_ref)
        assert set(rep) == set(TRACKED)
        assert max(rep.values()) <= 1e-6

    def test_rk4_order(self, rng, J_ref):
        M0 = random_skew(5, rng, 3.0)
        d1 = conservation_report(integrate(M0, J_ref, 0.04, 250), J_ref)["H"]
        d2 = conservation_report(integrate(M0, J_ref, 0.02, 500), J_ref)["H"]
        assert 12 <= d1 / d2 <= 20

    def test_projection_keeps_casimirs(self, rng, J_ref):
        M0 = random_skew(5, rng, 3.0)
        traj = integrate(M0, J_ref, 0.02, 500, scheme="rk4-project")
        c0 = np.array(casimirs(M0))
        for c in traj.coords:
            err = np.abs(np.array(casimirs(coords_to_matrix(c))) - c0) / np.abs(c0)
            assert np.max(err) <= 1e-12

    def test_projection_is_small_correction(self, rng, J_ref):
        c = as_coords(random_skew(5, rng))
        target = np.array(casimirs(coords_to_matrix(c)))
        moved = c + 1e-6 * rng.standard_normal(10)
        back = project_to_orbit(moved, target)
        assert np.linalg.norm(back - moved) <= 1e-5
        assert np.allclose(casimirs(coords_to_matrix(back)), target, rtol=1e-13)

    def test_times_uniform(self, rng, J_ref):
        traj = integrate(random_skew(5, rng), J_ref, 1e-2, 100, stride=7)
        assert len(traj) == 100 // 7 + 1
        assert np.allclose(np.diff(traj.times), 0.07)

    def test_antisymmetry_structural(self, rng, J_ref):
        traj = integrate(random_skew(5, rng), J_ref, 1e-2, 10)
        for M in traj.states:
            A = M.full()
            assert np.array_equal(A, -A.T)

    def test_large_step_warns(self, rng, J_ref):
        with pytest.warns(RuntimeWarning, match="dt"):
            integrate(random_skew(5, rng, 50.0), J_ref, 0.1, 1)

    def test_blowup_reports_step(self, J_ref):
        M0 = random_skew(5, np.random.default_rng(0), 1e3)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            with pytest.raises(IntegrationError) as info:
                integrate(M0, J_ref, 10.0, 50)
        assert info.value.step >= 1 and "step" in str(info.value)

    @pytest.mark.parametrize("kw", [{"dt": 0.0}, {"scheme": "euler"}, {"stride": 0}])
    def test_invalid_arguments(self, rng, J_ref, kw):
        args = {"dt": 1e-3, "scheme": "rk4", "stride": 1} | kw
        with pytest.raises(So5Error):
            integrate(random_skew(5, rng), J_ref, args["dt"], 10, args["scheme"], args["stride"])

    def test_ensemble_matches_single(self, rng, J_ref):
        C0 = np.array([as_coords(random_skew(5, rng)) for _ in range(4)])
        ens = integrate_ensemble(C0, J_ref, 1e-2, 50)
        single = integrate(coords_to_matrix(C0[2]), J_ref, 1e-2, 50)
        assert np.allclose(ens[:, 2], single.coords, rtol=0, atol=1e-14)


class TestDrift:
    def test_constant_trajectory(self, rng, J_ref):
        c = as_coords(random_skew(5, rng))
        assert max(drift(np.tile(c, (5, 1)), J_ref).values()) == 0.0

    def test_empty(self, J_ref):
        with pytest.raises(So5Error):
            conservation_report(Trajectory(np.zeros(0), np.zeros((0, 10)), "rk4", 1e-3), J_ref)

    def test_ensemble_axis(self, rng, J_ref):
        C0 = np.array([as_coords(random_skew(5, rng)) for _ in range(3)])
        ens = integrate_ensemble(C0, J_ref, 1e-2, 20)
        vals = tracked_integrals(ens, J_ref)
        assert vals["H"].shape == (21, 3)


class TestCsv:
    def test_round_trip(self, rng, J_ref):
        traj = integrate(random_skew(5, rng), J_ref, 1e-2, 20, stride=5)
        text = write_csv(traj)
        assert text.splitlines()[0] == "t," + ",".join(COORD_NAMES)
        back = read_csv(text)
        assert np.array_equal(back.coords, traj.coords)
        assert np.array_equal(back.times, traj.times)

    def test_bad_header(self):
        with pytest.raises(So5Error):
            read_csv("a,b\n1,2\n")


class TestPerturbations:
    def test_stable_t1_bounded(self, J_ref, inv_ref, rng):
        eq = cartan_point(1, "a,b", inv_ref)
        assert classify_equilibrium(eq, J_ref).status == STABLE
        eps = 1e-4
        for _ in range(3):
            v = rng.standard_normal(10)
            M0 = coords_to_matrix(eq.coords + eps * v / np.linalg.norm(v))
            traj = integrate(M0, J_ref, 1e-2, 10_000, stride=10)
            assert np.max(max_deviation(traj, eq.matrix)) <= 10 * eps

    @pytest.mark.parametrize("k,slot", [(3, "a,b"), (3, "b,a")])
    def test_unstable_t3_grows(self, J_ref, inv_ref, k, slot):
        eq = cartan_point(k, slot, inv_ref)
        assert classify_equilibrium(eq, J_ref).status == UNSTABLE
        assert _growth_time(eq, J_ref, 1e-6) >= 10

    @pytest.mark.parametrize("k", [2, 9])
    def test_disputed_rows_grow(self, J_ref, inv_ref, k):
        # the (a,b) slots of t2 and t9 are reported Unstable; the flow agrees
        eq = cartan_point(k, "a,b", inv_ref)
        assert _growth_time(eq, J_ref, 1e-6) >= 10

    def test_equilibrium_drift_free(self, J_ref):
        J = InertiaSpec((4.7, 3.1, 2.3, 1.7, 0.6))
        from so5body.equilibria import OrbitInvariants
        eq = cartan_point(12, "-b,a", OrbitInvariants.from_ab(1.3, 0.4))
        traj = integrate(eq.matrix, J, 1e-3, 1000)
        assert max(conservation_report(traj, J).values()) <= 1e-14
