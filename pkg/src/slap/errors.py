"""Exception hierarchy shared by all modules."""


class SlapError(Exception):
    """Base class for all toolkit errors."""


class PhysicsError(SlapError):
    """A numerical or physical precondition failed during a computation."""


class DomainError(PhysicsError, ValueError):
    """An input lies outside the domain of a closed-form expression."""


class ValidityError(DomainError):
    """A formula is evaluated outside its stated range of validity."""


class UndefinedAngleError(DomainError):
    """Both Rabi frequencies vanish, so the mixing angle is undefined."""


class StiffnessError(PhysicsError):
    """The adaptive integrator's step size underflowed."""

    def __init__(self, t, h, suggested_rtol):
        self.t = t
        self.h = h
        self.suggested_rtol = suggested_rtol
        super().__init__(
            f"step size underflow at t={t:.6e} (h={h:.3e}); "
            f"try a looser tolerance, e.g. rtol={suggested_rtol:.1e}"
        )


class NonUniqueSteadyStateError(PhysicsError):
    """The Liouvillian null space has dimension larger than one."""


class NoPeakError(PhysicsError):
    """No distinguishable peak exists where one was requested."""


class ConvergenceError(PhysicsError):
    """An iterative solver failed to converge."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class StepSizeError(PhysicsError):
    """A fixed time step is too coarse for the fastest scale in the problem."""


class ConfigError(SlapError):
    """A scenario configuration could not be parsed or is incomplete."""
