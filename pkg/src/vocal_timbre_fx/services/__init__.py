"""Workflows behind the command-line verbs; each returns a result dataclass."""

from vocal_timbre_fx.errors import (
    AudioFileNotFoundError,
    ConfigurationError,
    DatasetError,
    VocalFxError,
)

USAGE_ERRORS = (AudioFileNotFoundError, ConfigurationError, DatasetError)


def is_usage_error(error: BaseException) -> bool:
    """True for failures caused by invalid input rather than a runtime fault."""
    return isinstance(error, USAGE_ERRORS) or (
        isinstance(error, FileNotFoundError) and not isinstance(error, VocalFxError)
    )


__all__ = ["USAGE_ERRORS", "is_usage_error"]
