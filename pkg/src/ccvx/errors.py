"""Exception types shared across the library.

The CLI maps these onto exit codes: config problems exit with 2,
numerical failures at run time with 3.
"""


class CcvxError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(CcvxError):
    """Vector/matrix/domain dimensions are inconsistent."""


class OutsideDomain(CcvxError):
    """A base point that must lie in the domain does not."""


class UnboundedDomain(CcvxError):
    """Operation requires a bounded domain."""


class UnsupportedVariant(CcvxError):
    """No closed form / no supported mode for this domain variant."""


class SamplingError(CcvxError):
    """Rejection sampling failed (acceptance ratio too small)."""


class GramIndefinite(CcvxError):
    """Gram matrix not positive definite even after jitter."""


class NumericalFailure(CcvxError):
    """A certified numerical routine failed its own certificate."""


class PreconditionViolated(CcvxError):
    """A documented operation precondition does not hold for the inputs."""


class ConfigError(CcvxError):
    """Scenario/config file violates the documented schema."""
