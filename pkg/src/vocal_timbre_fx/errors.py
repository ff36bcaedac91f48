"""Exception hierarchy shared by every pipeline stage."""

from __future__ import annotations


class VocalFxError(Exception):
    """Base class for all errors raised by this package."""


class AudioFileNotFoundError(VocalFxError, FileNotFoundError):
    """The requested audio file does not exist."""


class MalformedWavError(VocalFxError):
    """The file is not a well-formed RIFF/WAVE container."""


class UnsupportedEncodingError(VocalFxError):
    """The WAV file uses a sample encoding other than 16-bit PCM or 32-bit float."""


class AudioWriteError(VocalFxError, OSError):
    """An audio file could not be written."""


class AnalysisError(VocalFxError):
    """Feature extraction could not run on the supplied clip."""


class ShapeError(VocalFxError, ValueError):
    """Operands have incompatible shapes."""


class DomainError(VocalFxError, ValueError):
    """A primitive was evaluated outside its mathematical domain."""


class GradientError(VocalFxError):
    """Reverse pass requested on something that cannot be differentiated."""


class CheckpointError(VocalFxError):
    """Base class for checkpoint persistence errors."""


class CorruptCheckpointError(CheckpointError):
    """The checkpoint file is truncated or garbled."""


class CheckpointVersionError(CheckpointError):
    """The checkpoint was written by an unknown format version."""


class ArchitectureMismatchError(CheckpointError):
    """Tensor shapes disagree with the architecture descriptor."""


class FeatureDumpError(VocalFxError):
    """A feature dump file is unreadable or inconsistent."""


class ConfigurationError(VocalFxError, ValueError):
    """A configuration value or command-line option is invalid."""


class DatasetError(VocalFxError):
    """A training dataset cannot be used as requested."""
