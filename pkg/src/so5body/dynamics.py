"""Time integration of the so(5) rigid-body flow with drift monitoring."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError, So5Error
from .invariants import tracked_integrals
from .lie_core import (
    COORD_NAMES,
    InertiaSpec,
    SkewMatrix,
    as_coords,
    coords_to_full,
    coords_to_matrix,
    full_to_coords,
    omega_from_momentum,
    rhs_jacobian_coords,
)

SCHEMES = ("rk4", "rk4-project")
TRACKED = ("H", "C1", "C2", "K1", "K2", "K3", "F1", "F2", "F3", "F4", "F5")


@dataclass
class Trajectory:
    """Uniformly sampled states stored as an (N, 10) coordinate array."""

    times: np.ndarray
    coords: np.ndarray
    scheme: str
    dt: float

    def __len__(self):
        return len(self.times)

    @property
    def states(self) -> list[SkewMatrix]:
        return [coords_to_matrix(c) for c in self.coords]

    def state(self, i: int) -> SkewMatrix:
        return coords_to_matrix(self.coords[i])


def field_tensor(J: InertiaSpec) -> np.ndarray:
    """(100, 10) array B with rhs(c) = (B c).reshape(10, 10) @ c / 2.

    The field is quadratic, so its Jacobian is linear in c and this is exact.
    """
    jac = np.array([rhs_jacobian_coords(e, J) for e in np.eye(10)])
    return np.transpose(jac, (1, 2, 0)).reshape(100, 10)


def _field(c: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Vector field for one state (10,) or a batch (K, 10)."""
    L = (c @ B.T).reshape(c.shape[:-1] + (10, 10))
    return 0.5 * np.einsum("...kj,...j->...k", L, c)


def _rk4_step(c, B, dt):
    k1 = _field(c, B)
    k2 = _field(c + 0.5 * dt * k1, B)
    k3 = _field(c + 0.5 * dt * k2, B)
    k4 = _field(c + dt * k3, B)
    return c + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _casimir_values(c):
    A = coords_to_full(c)
    A2 = A @ A
    return np.array([-0.25 * np.trace(A2), 0.125 * np.sum(A2 * A2.T)])


def project_to_orbit(c, target, max_iter=5, tol=1e-13):
    """Newton projection onto {C1 = target[0], C2 = target[1]}.

    The correction lies in span(grad C1, grad C2) = span(M, M^3).
    """
    c = np.array(c, dtype=float)
    for _ in range(max_iter):
        f = _casimir_values(c) - target
        if np.all(np.abs(f) <= tol * (1 + np.abs(target))):
            break
        A = coords_to_full(c)
        G = np.array([c, full_to_coords(-(A @ A @ A))])  # gradients of C1, C2
        lam = np.linalg.solve(G @ G.T, f)
        c = c - G.T @ lam
    return c


def integrate(M0, J: InertiaSpec, dt: float, steps: int, scheme: str = "rk4",
              stride: int = 1) -> Trajectory:
    """Classical RK4 for dM/dt = [M, Omega]; 'rk4-project' re-projects onto the orbit."""
    J.require_dim(5)
    if scheme not in SCHEMES:
        raise So5Error(f"unknown scheme {scheme!r}; expected one of {', '.join(SCHEMES)}")
    if not dt > 0:
        raise So5Error(f"dt must be positive, got {dt}")
    steps, stride = int(steps), int(stride)
    if steps < 0 or stride < 1:
        raise So5Error("steps must be >= 0 and stride >= 1")
    c = np.array(as_coords(M0), dtype=float)
    w = omega_from_momentum(coords_to_matrix(c), J).norm()
    if dt * w > 0.1:
        warnings.warn(f"dt*|Omega| = {dt * w:.3g} > 0.1; RK4 accuracy will suffer",
                      RuntimeWarning, stacklevel=2)
    B = field_tensor(J)
    target = _casimir_values(c)
    n_out = steps // stride + 1
    out = np.empty((n_out, 10))
    times = np.arange(n_out) * (dt * stride)
    out[0] = c
    for s in range(1, steps + 1):
        c = _rk4_step(c, B, dt)
        if scheme == "rk4-project":
            c = project_to_orbit(c, target)
        if not np.all(np.isfinite(c)):
            raise IntegrationError(s)
        if s % stride == 0:
            out[s // stride] = c
    return Trajectory(times, out, scheme, float(dt))


def integrate_ensemble(C0, J: InertiaSpec, dt: float, steps: int, stride: int = 1
                       ) -> np.ndarray:
    """Plain RK4 on K independent states at once; returns (steps//stride + 1, K, 10)."""
    J.require_dim(5)
    c = np.array(C0, dtype=float).reshape(-1, 10)
    B = field_tensor(J)
    out = np.empty((int(steps) // stride + 1,) + c.shape)
    out[0] = c
    for s in range(1, int(steps) + 1):
        c = _rk4_step(c, B, dt)
        if not np.all(np.isfinite(c)):
            raise IntegrationError(s)
        if s % stride == 0:
            out[s // stride] = c
    return out


def drift(coords: np.ndarray, J: InertiaSpec) -> dict:
    """Per-integral max relative drift along axis 0 of a (..., 10) coordinate array."""
    vals = tracked_integrals(coords, J)
    out = {}
    for name in TRACKED:
        v = np.asarray(vals[name])
        out[name] = float(np.max(np.abs(v - v[0]) / (1 + np.abs(v[0]))))
    return out


def conservation_report(traj: Trajectory, J: InertiaSpec) -> dict:
    """Max over the trajectory of |I(t) - I(0)| / (1 + |I(0)|) for each tracked integral."""
    if len(traj) == 0:
        raise So5Error("empty trajectory")
    return drift(traj.coords, J)


def write_csv(traj: Trajectory, fh=None) -> str | None:
    """Header t,x1,...,z4 then one row per stored state, 17 significant digits."""
    buf = io.StringIO() if fh is None else fh
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("t",) + COORD_NAMES)
    for t, c in zip(traj.times, traj.coords):
        w.writerow([format(float(t), ".17g")] + [format(float(x), ".17g") for x in c])
    return buf.getvalue() if fh is None else None


def read_csv(text: str) -> Trajectory:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != ("t",) + COORD_NAMES:
        raise So5Error("not a trajectory CSV: header mismatch")
    data = np.array([[float(x) for x in r] for r in rows[1:]]).reshape(-1, 11)
    dt = float(data[1, 0] - data[0, 0]) if len(data) > 1 else 0.0
    return Trajectory(data[:, 0], data[:, 1:], "csv", dt)


def max_deviation(traj: Trajectory, M) -> np.ndarray:
    """Distance of every stored state from M."""
    return np.linalg.norm(traj.coords - as_coords(M), axis=1)
