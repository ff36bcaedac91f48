"""Training data: analyzed clips, frame-aligned windows and source mixing."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from vocal_timbre_fx.audio import read_wav, resample
from vocal_timbre_fx.config import PipelineConfig
from vocal_timbre_fx.errors import ConfigurationError, DatasetError
from vocal_timbre_fx.features import analyze, hold_voiced_f0, load_features
from vocal_timbre_fx.models import AudioClip, FeatureDump, MfccTrack
from vocal_timbre_fx.nn.architecture import NormalizationStats

logger = logging.getLogger(__name__)

MIN_LOUDNESS_STD = 1.0


@dataclass(frozen=True, eq=False)
class TrainingExample:
    """One clip at the model rate together with its analysis."""

    name: str
    clip: AudioClip
    features: FeatureDump

    def __post_init__(self) -> None:
        if self.clip.sample_rate != self.features.sample_rate:
            raise DatasetError(f"{self.name}: clip and features disagree on sample rate.")

    @property
    def n_frames(self) -> int:
        return self.features.n_frames


@dataclass(frozen=True, eq=False)
class TrainingWindow:
    """A frame-aligned excerpt: target audio plus the decoder's conditioning."""

    audio: np.ndarray
    f0: np.ndarray
    loudness: np.ndarray
    mfcc: MfccTrack
    source: str


@dataclass(frozen=True, eq=False)
class DatasetSampler:
    """How the train loop draws windows; audio is referenced, never copied.

    Parameters
    ----------
    sources:
        One or two groups of examples.
    weights:
        Probability of drawing from each group; sums to 1.
    names:
        Label per group, used in logs.
    """

    sources: Tuple[Tuple[TrainingExample, ...], ...]
    weights: Tuple[float, ...]
    names: Tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.sources or any(len(group) == 0 for group in self.sources):
            raise DatasetError("Every dataset source needs at least one clip.")
        if len(self.weights) != len(self.sources) or abs(sum(self.weights) - 1.0) > 1e-9:
            raise DatasetError("Source weights must match the sources and sum to 1.")
        rates = {ex.clip.sample_rate for group in self.sources for ex in group}
        if len(rates) != 1:
            raise DatasetError(f"Clips have inconsistent sample rates: {sorted(rates)}.")

    @property
    def examples(self) -> Tuple[TrainingExample, ...]:
        return tuple(ex for group in self.sources for ex in group)

    @property
    def sample_rate(self) -> int:
        return self.sources[0][0].clip.sample_rate

    @property
    def shortest_frames(self) -> int:
        return min(ex.n_frames for ex in self.examples)

    def check_window(self, window_frames: int) -> None:
        if window_frames > self.shortest_frames:
            raise DatasetError(
                f"Training window of {window_frames} frames is longer than the shortest clip "
                f"({self.shortest_frames} frames)."
            )

    def draw_source(self, rng: np.random.Generator) -> int:
        if len(self.sources) == 1:
            return 0
        return int(rng.random() >= self.weights[0])

    def draw(self, rng: np.random.Generator, window_samples: int, hop: int) -> TrainingWindow:
        """Pick a source by weight, a clip uniformly, then a frame-aligned start uniformly."""
        window_frames = window_samples // hop
        self.check_window(window_frames)
        source = self.draw_source(rng)
        group = self.sources[source]
        example = group[int(rng.integers(len(group)))]
        start = int(rng.integers(example.n_frames - window_frames + 1))
        stop = start + window_frames

        dump = example.features
        return TrainingWindow(
            audio=example.clip.samples[start * hop : stop * hop],
            f0=hold_voiced_f0(dump.track.f0)[start:stop],
            loudness=dump.track.loudness[start:stop],
            mfcc=MfccTrack(dump.mfcc.coefficients[start:stop], dump.frame_rate),
            source=self.names[source],
        )

    def normalization_stats(self) -> NormalizationStats:
        """Loudness mean/std over every frame of every clip."""
        loudness = np.concatenate([ex.features.track.loudness for ex in self.examples])
        return NormalizationStats(
            loudness_mean=float(np.mean(loudness)),
            loudness_std=max(float(np.std(loudness)), MIN_LOUDNESS_STD),
        )


def single_dataset(examples: Sequence[TrainingExample], name: str = "data") -> DatasetSampler:
    return DatasetSampler(sources=(tuple(examples),), weights=(1.0,), names=(name,))


def mix_datasets(
    vocal_set: Sequence[TrainingExample], instrument_set: Sequence[TrainingExample], ratio: float
) -> DatasetSampler:
    """Draw a `ratio` fraction of windows from `vocal_set`, the rest from `instrument_set`.

    Raises
    ------
    ConfigurationError
        If `ratio` is not strictly between 0 and 1.
    DatasetError
        If either set is empty.
    """
    if not 0.0 < ratio < 1.0:
        raise ConfigurationError(f"Mix ratio must lie strictly between 0 and 1, got {ratio}.")
    if not vocal_set or not instrument_set:
        raise DatasetError("Both the vocal and the instrument set need at least one clip.")
    return DatasetSampler(
        sources=(tuple(vocal_set), tuple(instrument_set)),
        weights=(ratio, 1.0 - ratio),
        names=("vocal", "instrument"),
    )


def load_example(path: Path, cfg: PipelineConfig) -> TrainingExample:
    """Read a WAV at the model rate; reuse a matching `<stem>.feat` next to it if present."""
    clip = resample(read_wav(path), cfg.sample_rate)
    dump = _cached_features(path.with_suffix(".feat"), clip, cfg)
    if dump is None:
        dump = analyze(clip, cfg)
    return TrainingExample(name=path.stem, clip=clip, features=dump)


def _cached_features(path: Path, clip: AudioClip, cfg: PipelineConfig) -> Optional[FeatureDump]:
    if not path.exists():
        return None
    dump = load_features(path)
    expected_frames = len(clip) // cfg.hop
    if (
        dump.sample_rate != cfg.sample_rate
        or dump.frame_rate != cfg.frame_rate
        or dump.n_frames != expected_frames
        or dump.mfcc.coefficients.shape[1] != cfg.mfcc.n_mfcc
        or dump.harmonics.amplitudes.shape[1] != cfg.synth.n_harmonics
    ):
        logger.info("Ignoring stale feature dump %s", path)
        return None
    return dump


def load_dataset_dir(directory: Path, cfg: PipelineConfig) -> List[TrainingExample]:
    """Every `*.wav` in `directory`, sorted by name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetError(f"Dataset directory not found: {directory}")
    paths = sorted(directory.glob("*.wav"))
    if not paths:
        raise DatasetError(f"No WAV files in {directory}.")
    examples = [load_example(path, cfg) for path in paths]
    logger.info("Loaded %d clips from %s", len(examples), directory)
    return examples
