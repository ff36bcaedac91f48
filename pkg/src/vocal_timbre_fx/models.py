"""Data models shared across analysis, synthesis, training, services and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from vocal_timbre_fx.errors import ConfigurationError, ShapeError


@dataclass(frozen=True, eq=False)
class AudioClip:
    """Mono audio with its sample rate.

    Parameters
    ----------
    samples:
        Real amplitudes, nominally in [-1, 1].
    sample_rate:
        Samples per second.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ShapeError(f"AudioClip expects mono samples, got shape {samples.shape}.")
        if int(self.sample_rate) <= 0:
            raise ConfigurationError(f"sample_rate must be positive, got {self.sample_rate}.")
        if not np.all(np.isfinite(samples)):
            raise ValueError("AudioClip samples must be finite.")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return len(self) / self.sample_rate

    def rms(self) -> float:
        """Root-mean-square level (0 for an empty clip)."""
        if len(self) == 0:
            return 0.0
        return float(np.sqrt(np.mean(self.samples**2)))


@dataclass(frozen=True, eq=False)
class FeatureTrack:
    """Frame-rate conditioning signals.

    Parameters
    ----------
    frame_rate:
        Frames per second.
    f0:
        Fundamental frequency per frame in Hz, 0 for unvoiced frames.
    confidence:
        Voicing confidence per frame in [0, 1].
    loudness:
        A-weighted loudness per frame in dB.

    Notes
    -----
    Extractors fill only the fields they compute; `merge` combines partial tracks.
    """

    frame_rate: float
    f0: Optional[np.ndarray] = None
    confidence: Optional[np.ndarray] = None
    loudness: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        lengths = set()
        for name in ("f0", "confidence", "loudness"):
            value = getattr(self, name)
            if value is None:
                continue
            arr = np.asarray(value, dtype=np.float64)
            object.__setattr__(self, name, arr)
            lengths.add(arr.shape[0])
        if len(lengths) > 1:
            raise ShapeError(f"FeatureTrack sequences differ in length: {sorted(lengths)}.")
        if self.confidence is not None and (np.any(self.confidence < 0) or np.any(self.confidence > 1)):
            raise ValueError("confidence must lie in [0, 1].")

    @property
    def n_frames(self) -> int:
        for value in (self.f0, self.loudness, self.confidence):
            if value is not None:
                return int(value.shape[0])
        return 0

    def merge(self, other: "FeatureTrack") -> "FeatureTrack":
        """Combine two partial tracks; fields of `other` win where both are set."""
        return FeatureTrack(
            frame_rate=self.frame_rate,
            f0=other.f0 if other.f0 is not None else self.f0,
            confidence=other.confidence if other.confidence is not None else self.confidence,
            loudness=other.loudness if other.loudness is not None else self.loudness,
        )


@dataclass(frozen=True, eq=False)
class MfccTrack:
    """Per-frame MFCCs, shape [frames, n_mfcc]."""

    coefficients: np.ndarray
    frame_rate: float

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coefficients, dtype=np.float64)
        if coeffs.ndim != 2:
            raise ShapeError(f"MFCC matrix must be 2-D, got shape {coeffs.shape}.")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("MFCC values must be finite.")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def n_frames(self) -> int:
        return int(self.coefficients.shape[0])


@dataclass(frozen=True, eq=False)
class HarmonicTrack:
    """Measured input harmonic amplitudes A_k^in, shape [frames, K]."""

    amplitudes: np.ndarray
    frame_rate: float

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.float64)
        if amps.ndim != 2:
            raise ShapeError(f"Harmonic matrix must be 2-D, got shape {amps.shape}.")
        if np.any(amps < 0):
            raise ValueError("Harmonic amplitudes must be non-negative.")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_frames(self) -> int:
        return int(self.amplitudes.shape[0])


@dataclass(frozen=True, eq=False)
class SynthControls:
    """Frame-rate synthesizer controls predicted by the decoder.

    Parameters
    ----------
    amplitude:
        Global amplitude a(n) per frame, shape [frames].
    harmonics:
        Harmonic distribution A_k(n), shape [frames, K], rows in the simplex.
    noise_mags:
        Noise filter magnitude samples from 0 Hz to Nyquist, shape [frames, B].
    frame_rate:
        Frames per second.

    Notes
    -----
    Fields are numpy arrays or autodiff tensors; tensors keep the controls on the
    active tape during training.
    """

    amplitude: object
    harmonics: object
    noise_mags: object
    frame_rate: float

    def __post_init__(self) -> None:
        frames = {_leading(self.amplitude), _leading(self.harmonics), _leading(self.noise_mags)}
        if len(frames) != 1:
            raise ShapeError(f"SynthControls fields disagree on frame count: {sorted(frames)}.")

    @property
    def n_frames(self) -> int:
        return _leading(self.amplitude)

    @property
    def n_harmonics(self) -> int:
        return int(_shape(self.harmonics)[1])

    @property
    def n_noise_bins(self) -> int:
        return int(_shape(self.noise_mags)[1])

    def with_harmonics(self, harmonics: object) -> "SynthControls":
        """Return a copy with the harmonic distribution replaced."""
        return SynthControls(self.amplitude, harmonics, self.noise_mags, self.frame_rate)


def _shape(value: object) -> Tuple[int, ...]:
    return tuple(getattr(value, "shape", np.shape(value)))


def _leading(value: object) -> int:
    return int(_shape(value)[0])


@dataclass(frozen=True)
class InterpolationFactor:
    """Cross-synthesis blend factor p in [0, 1]."""

    p: float

    def __post_init__(self) -> None:
        if not (0.0 <= float(self.p) <= 1.0):
            raise ConfigurationError(f"Interpolation factor p must lie in [0, 1], got {self.p}.")
        object.__setattr__(self, "p", float(self.p))


@dataclass(frozen=True, eq=False)
class FeatureDump:
    """Everything the analysis stage extracts from one clip."""

    track: FeatureTrack
    mfcc: MfccTrack
    harmonics: HarmonicTrack
    sample_rate: int

    @property
    def frame_rate(self) -> float:
        return self.track.frame_rate

    @property
    def n_frames(self) -> int:
        return self.track.n_frames


@dataclass(frozen=True)
class FeatureExtractionResult:
    """Outcome of a `features` run.

    Parameters
    ----------
    success:
        True if the dump was written.
    message:
        Human-readable status message.
    n_frames:
        Frames written per array.
    usage_error:
        True when the failure stems from invalid input rather than a runtime fault.
    """

    success: bool
    message: str
    n_frames: int = 0
    usage_error: bool = False


@dataclass(frozen=True)
class SynthesisResult:
    """Outcome of a `resynth` or `xsynth` run."""

    success: bool
    message: str
    outputs: Tuple[Path, ...] = ()
    usage_error: bool = False


@dataclass(frozen=True)
class TrainingResult:
    """Outcome of a `train` run.

    Parameters
    ----------
    checkpoints:
        Checkpoint files written, in step order.
    final_loss:
        Loss of the last step, if training ran.
    """

    success: bool
    message: str
    checkpoints: Tuple[Path, ...] = ()
    final_loss: Optional[float] = None
    usage_error: bool = False


@dataclass(frozen=True)
class InspectionResult:
    """Outcome of an `inspect` run; `lines` are printed verbatim."""

    success: bool
    message: str
    lines: Tuple[str, ...] = field(default_factory=tuple)
    usage_error: bool = False
