"""A-weighted frame loudness."""

from __future__ import annotations

import librosa
import numpy as np

from vocal_timbre_fx.config import LoudnessConfig
from vocal_timbre_fx.features.framing import hann, hop_size, stft_power
from vocal_timbre_fx.models import AudioClip, FeatureTrack


def a_weighting_gains(sample_rate: int, n_fft: int) -> np.ndarray:
    """Linear power gains of the A-weighting curve at each rfft bin."""
    freqs = np.fft.rfftfreq(n_fft, d=1.0 / sample_rate)
    return 10.0 ** (librosa.A_weighting(freqs, min_db=-200.0) / 10.0)


def extract_loudness(clip: AudioClip, cfg: LoudnessConfig = LoudnessConfig(), frame_rate: float = 250) -> FeatureTrack:
    """Per-frame A-weighted power in dB, clamped to `cfg.floor_db`.

    The power of a frame is the A-weighted mean square of its Hann-windowed
    samples (Parseval over the one-sided spectrum), so a full-scale 1 kHz sine
    reads about -3 dB and scaling the clip by g shifts every frame above the floor
    by exactly 20*log10(g).

    Returns
    -------
    FeatureTrack
        Track with `loudness` filled.
    """
    hop = hop_size(clip.sample_rate, frame_rate)
    n_fft = cfg.n_fft
    window = hann(n_fft)
    power = stft_power(clip.samples, hop, n_fft)

    one_sided = np.full(power.shape[1], 2.0)
    one_sided[0] = 1.0
    if n_fft % 2 == 0:
        one_sided[-1] = 1.0
    weights = one_sided * a_weighting_gains(clip.sample_rate, n_fft)
    weighted = power @ weights / (n_fft * np.sum(window**2))

    floor_power = 10.0 ** (cfg.floor_db / 10.0)
    loudness = 10.0 * np.log10(np.maximum(weighted, floor_power))
    return FeatureTrack(frame_rate=frame_rate, loudness=loudness)
