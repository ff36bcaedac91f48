"""WAV reading, writing and band-limited resampling."""

from __future__ import annotations

import logging
from math import gcd
from pathlib import Path

import numpy as np
import soundfile as sf
from scipy.signal import firwin, resample_poly

from vocal_timbre_fx.errors import (
    AudioFileNotFoundError,
    AudioWriteError,
    MalformedWavError,
    UnsupportedEncodingError,
)
from vocal_timbre_fx.models import AudioClip

logger = logging.getLogger(__name__)

SUPPORTED_SUBTYPES = ("PCM_16", "FLOAT")
RESAMPLE_TAPS_PER_SIDE = 32
RESAMPLE_KAISER_BETA = 8.6


def read_wav(path: Path) -> AudioClip:
    """Read a 16-bit PCM or 32-bit float WAV file as a mono clip.

    Parameters
    ----------
    path:
        WAV file to read. Multi-channel files are averaged to mono.

    Returns
    -------
    AudioClip
        Samples normalized to [-1, 1] at the file's sample rate.

    Raises
    ------
    AudioFileNotFoundError
        If `path` does not exist.
    MalformedWavError
        If the RIFF/WAVE header is missing or damaged.
    UnsupportedEncodingError
        If the sample encoding is neither PCM_16 nor FLOAT.
    """
    path = Path(path)
    if not path.is_file():
        raise AudioFileNotFoundError(f"Audio file not found: {path}")

    with open(path, "rb") as f:
        header = f.read(12)
    if len(header) < 12 or header[:4] != b"RIFF" or header[8:12] != b"WAVE":
        raise MalformedWavError(f"{path} is not a RIFF/WAVE file.")

    try:
        info = sf.info(str(path))
    except sf.SoundFileError as e:
        raise MalformedWavError(f"{path}: malformed WAV header ({e}).") from e
    if info.subtype not in SUPPORTED_SUBTYPES:
        raise UnsupportedEncodingError(
            f"{path}: unsupported encoding {info.subtype}; expected one of {SUPPORTED_SUBTYPES}."
        )

    try:
        data, sample_rate = sf.read(str(path), dtype="float64", always_2d=True)
    except sf.SoundFileError as e:
        raise MalformedWavError(f"{path}: could not decode samples ({e}).") from e

    samples = data.mean(axis=1) if data.shape[1] > 1 else data[:, 0]
    if not np.all(np.isfinite(samples)):
        raise MalformedWavError(f"{path}: contains non-finite samples.")
    logger.debug("Read %s: %d samples @ %d Hz, %d channel(s)", path, samples.shape[0], sample_rate, info.channels)
    return AudioClip(samples=samples, sample_rate=sample_rate)


def write_wav(clip: AudioClip, path: Path) -> None:
    """Write `clip` as a 16-bit PCM mono WAV file.

    Samples are clamped to the representable range and rounded to the nearest
    quantization step, so a read back is within 1/32768 of the input.

    Raises
    ------
    AudioWriteError
        If the destination cannot be written.
    """
    quantized = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype(np.int16)
    try:
        sf.write(str(path), quantized, clip.sample_rate, subtype="PCM_16", format="WAV")
    except (sf.SoundFileError, OSError) as e:
        raise AudioWriteError(f"Could not write {path}: {e}") from e
    logger.debug("Wrote %s: %d samples @ %d Hz", path, len(clip), clip.sample_rate)


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Convert `clip` to `target_rate` with a Kaiser-windowed-sinc polyphase filter.

    The output holds round(len * target_rate / sample_rate) samples. Equal rates
    return the input unchanged.
    """
    target_rate = int(target_rate)
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}.")
    if target_rate == clip.sample_rate:
        return clip

    g = gcd(target_rate, clip.sample_rate)
    up, down = target_rate // g, clip.sample_rate // g
    n_out = int(round(len(clip) * target_rate / clip.sample_rate))
    if len(clip) == 0:
        return AudioClip(samples=np.zeros(0), sample_rate=target_rate)

    max_rate = max(up, down)
    taps = firwin(
        2 * RESAMPLE_TAPS_PER_SIDE * max_rate + 1,
        1.0 / max_rate,
        window=("kaiser", RESAMPLE_KAISER_BETA),
    )
    out = resample_poly(clip.samples, up, down, window=taps)
    if out.shape[0] >= n_out:
        out = out[:n_out]
    else:
        out = np.pad(out, (0, n_out - out.shape[0]))
    logger.debug("Resampled %d -> %d Hz (%d -> %d samples)", clip.sample_rate, target_rate, len(clip), n_out)
    return AudioClip(samples=out, sample_rate=target_rate)
