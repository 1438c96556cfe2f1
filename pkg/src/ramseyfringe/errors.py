"""Exception types raised by the numerical routines."""


class RamseyError(Exception):
    """Base class for numerical-domain failures."""


class StepInvalid(RamseyError, ValueError):
    """Integrator step does not resolve the fastest time scale."""


class DefectExceeded(RamseyError):
    """Propagator drifted from unitarity beyond the allowed threshold."""


class DomainError(RamseyError, ValueError):
    """Inputs outside the region where a formula or quadrature applies."""


class NoZeroFound(RamseyError):
    pass


class HalfMaxNotBracketed(RamseyError):
    pass
