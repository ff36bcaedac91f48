"""Feature dump files (`.feat`)."""

from __future__ import annotations

import logging
from pathlib import Path

from vocal_timbre_fx.container import Container, read_container, write_container
from vocal_timbre_fx.errors import FeatureDumpError, VocalFxError
from vocal_timbre_fx.models import FeatureDump, FeatureTrack, HarmonicTrack, MfccTrack

logger = logging.getLogger(__name__)

FEATURE_MAGIC = b"VTFXFEAT"
FEATURE_VERSION = 1


def save_features(dump: FeatureDump, path: Path) -> None:
    """Write `dump` as a version-tagged little-endian container."""
    container = Container(
        magic=FEATURE_MAGIC,
        version=FEATURE_VERSION,
        ints={"sample_rate": dump.sample_rate},
        floats={"frame_rate": float(dump.frame_rate)},
        arrays={
            "f0": dump.track.f0,
            "loudness": dump.track.loudness,
            "confidence": dump.track.confidence,
            "mfcc": dump.mfcc.coefficients,
            "harmonics": dump.harmonics.amplitudes,
        },
    )
    write_container(container, path)
    logger.debug("Wrote feature dump %s (%d frames)", path, dump.n_frames)


def load_features(path: Path) -> FeatureDump:
    """Read a feature dump written by `save_features`.

    Raises
    ------
    FeatureDumpError
        If the file is missing, truncated, of another version, or inconsistent.
    """
    try:
        container = read_container(path, FEATURE_MAGIC, (FEATURE_VERSION,), FeatureDumpError, FeatureDumpError)
    except FileNotFoundError as e:
        raise FeatureDumpError(f"Feature dump not found: {path}") from e

    missing = {"f0", "loudness", "confidence", "mfcc", "harmonics"} - set(container.arrays)
    if missing or "sample_rate" not in container.ints or "frame_rate" not in container.floats:
        raise FeatureDumpError(f"{path}: incomplete feature dump (missing {sorted(missing)}).")

    arrays = container.arrays
    frame_rate = container.floats["frame_rate"]
    try:
        track = FeatureTrack(
            frame_rate=frame_rate,
            f0=arrays["f0"],
            confidence=arrays["confidence"],
            loudness=arrays["loudness"],
        )
        mfcc = MfccTrack(coefficients=arrays["mfcc"], frame_rate=frame_rate)
        harmonics = HarmonicTrack(amplitudes=arrays["harmonics"], frame_rate=frame_rate)
    except (VocalFxError, ValueError) as e:
        raise FeatureDumpError(f"{path}: {e}") from e
    if not (mfcc.n_frames == harmonics.n_frames == track.n_frames):
        raise FeatureDumpError(f"{path}: arrays disagree on frame count.")
    return FeatureDump(track=track, mfcc=mfcc, harmonics=harmonics, sample_rate=int(container.ints["sample_rate"]))
