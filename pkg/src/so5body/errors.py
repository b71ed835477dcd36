"""Exception types raised at the library boundary."""


class So5Error(ValueError):
    """Base class for rejected inputs."""


class DimensionError(So5Error):
    pass


class InertiaError(So5Error):
    """Inertia parameters violate genericity, distinctness or ordering."""


class OrbitError(So5Error):
    """Casimir values do not describe a regular adjoint orbit."""


class DegeneratePointError(So5Error):
    """The Casimir differentials are dependent at the requested point."""


class IntegrationError(RuntimeError):
    def __init__(self, step, message="non-finite state"):
        super().__init__(f"{message} at step {step}")
        self.step = step
