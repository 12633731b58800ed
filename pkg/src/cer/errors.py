"""Domain exception hierarchy.

Everything raised on bad data, bad configuration, or failing providers
derives from CerError so the CLI can map domain failures to a single
exit code while programming errors still surface as ordinary tracebacks.
"""


class CerError(Exception):
    """Base class for all domain errors raised by this package."""


class CorpusError(CerError):
    """Corpus ingestion or indexing received unusable input."""


class IndexFormatError(CerError):
    """An index file is truncated, corrupt, or has the wrong magic."""


class SchemaError(CerError):
    """A record violates the interchange schema. Names line and field."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if field is not None:
            parts.append(f"field '{field}'")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.line = line
        self.field = field


class DatasetError(CerError):
    """A dataset file or label cannot be interpreted."""


class ConfigError(CerError):
    """Configuration is inconsistent or refers to unknown settings."""


class ProviderError(CerError):
    """A remote or mock provider failed to produce a usable response."""

    def __init__(self, message: str, status: int | None = None, retryable: bool = False):
        super().__init__(message)
        self.status = status
        self.retryable = retryable
