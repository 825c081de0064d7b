"""Exception types raised by the public API.

Every exception derives from :class:`OrdcifError` and from :class:`ValueError`,
so callers may catch either the package base class or the builtin.
"""


class OrdcifError(ValueError):
    """Base class for all errors raised by this package."""


class NonPositiveTimeError(OrdcifError):
    """An observation time was zero, negative, or non-finite."""


class CauseOutOfRangeError(OrdcifError):
    """A cause code was outside {0, 1, ..., k}."""


class EmptyInputError(OrdcifError):
    """No observations were supplied."""


class BadKError(OrdcifError):
    """The number of causes k was below 2 (or not an integer)."""


class CensoringPresentError(OrdcifError):
    """An operation valid only for uncensored data met a cause-0 record."""


class BadCauseIndexError(OrdcifError):
    """A cause index was outside {1, ..., k}."""


class EmptyVectorError(OrdcifError):
    """An isotonic projection was requested for an empty vector."""


class AlreadyRestrictedError(OrdcifError):
    """restrict_cifs received a CifSet that is already restricted."""


class OutOfRangeError(OrdcifError):
    """A probability argument fell outside [0, 1]."""


class EmptyRiskSetError(OrdcifError):
    """A covariance jump-sum met a time with nobody at risk."""


class BadQueryError(OrdcifError):
    """A covariance query had bad indices or a bad time pair."""


class BadLevelError(OrdcifError):
    """A confidence level was outside (0, 1)."""


class BadJError(OrdcifError):
    """A sub-test index j was outside {2, ..., k}."""


class BadConfigError(OrdcifError):
    """A simulation configuration failed validation."""


class NotNullError(OrdcifError):
    """A null-distribution study was given unequal hazards."""


class TieSetSingletonError(OrdcifError):
    """A dominance study was configured with a singleton tie set."""
