"""Error taxonomy, aligned with the consumer's exit-code conventions."""


class ExtractorError(Exception):
    """Base class for everything raised on purpose."""


class ConfigError(ExtractorError):
    """Invalid parameters or configuration (exit code 2)."""


class SourceError(ExtractorError):
    """A video or frame directory cannot be read (exit code 3)."""


class BackendUnavailable(ExtractorError):
    """A detector or encoder backend cannot be constructed here.

    Raised when optional dependencies or pretrained weights are missing;
    the message says what to install or download.
    """
