"""Exception types shared across the laboratory."""


class OpineqError(Exception):
    """Base class for every error raised by this package."""


class DimMismatch(OpineqError):
    """Matrix or tuple dimensions do not line up."""


class NotHermitian(OpineqError):
    """A matrix required to be self-adjoint is not, beyond tolerance."""


class NotPSD(OpineqError):
    """A matrix required to be positive semidefinite has a genuinely negative eigenvalue."""


class SingularNegativePower(OpineqError):
    """A negative fractional power was requested of a singular matrix."""


class InvalidK(OpineqError):
    """Ky Fan order k outside 1..dim."""


class CtxMismatch(OpineqError):
    """Module elements from different contexts were combined."""


class NotUnital(OpineqError):
    """The reference element of a covariance context is not a unit vector."""


class NotNormal(OpineqError):
    """A check hypothesis requires normal elements and the input is not normal."""


class NotContractive(OpineqError):
    """A contraction hypothesis (norm or spectral radius below one) fails."""


class MaxTermsExceeded(OpineqError):
    """An operator series would need more terms than the configured cap."""


class DimCap(OpineqError):
    """The vectorized d^2 x d^2 representation exceeds the configured cap."""


class BadExponents(OpineqError):
    """Schatten exponents (p, q, r) violate 1/q + 1/r = 2/p or are not all > 1."""


class BallViolated(OpineqError):
    """An element is outside the ball its check hypothesis places it in."""


class InvalidSpec(OpineqError):
    """A generator or run configuration is out of range."""


class UnknownCheck(OpineqError):
    """A check name not present in the registry."""


class IOFailure(OpineqError):
    """Reading or writing reports/instances failed."""
