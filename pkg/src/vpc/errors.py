"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: validation-type errors exit 2, I/O and
file-format errors exit 3, configuration drift exits 4.
"""


class VpcError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(VpcError):
    """An input value violates a documented invariant."""


class ParameterError(ValidationError):
    """A parameter is outside its allowed range."""


class DimensionError(ValidationError):
    """A tensor shape is incompatible with the requested operation."""


class EmptyObjectError(ValidationError):
    """A clip with no detected objects was passed where objects are required."""


class EmptyBankError(ValidationError):
    """A memory bank would be built from zero patches."""


class UndefinedMetricError(ValidationError):
    """A metric is undefined for this input (e.g. single-class AUROC)."""


class FormatError(VpcError):
    """A byte stream does not start with the expected magic/version."""


class CorruptionError(FormatError):
    """A structurally valid file ends or disagrees mid-payload."""


class ConfigDriftError(VpcError):
    """A persisted artifact was built under an incompatible configuration."""
