"""Free rigid body on so(n), with the so(5) case worked out in full."""

__version__ = "0.1.0"

from .equilibria import (  # noqa: E402
    OrbitInvariants,
    cartan_point,
    continuous_family,
    is_equilibrium,
    weyl_ab,
    weyl_orbit_points,
)
from .errors import (  # noqa: E402
    DegeneratePointError,
    DimensionError,
    InertiaError,
    IntegrationError,
    OrbitError,
    So5Error,
)
from .lie_core import InertiaSpec, SkewMatrix, rigid_body_rhs  # noqa: E402
from .stability import classify_equilibrium, restricted_spectrum  # noqa: E402

__all__ = [
    "DegeneratePointError", "DimensionError", "InertiaError", "IntegrationError",
    "InertiaSpec", "OrbitError", "OrbitInvariants", "SkewMatrix", "So5Error",
    "cartan_point", "classify_equilibrium", "continuous_family", "is_equilibrium",
    "restricted_spectrum", "rigid_body_rhs", "weyl_ab", "weyl_orbit_points",
]
