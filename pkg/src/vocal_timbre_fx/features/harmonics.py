"""Measured harmonic amplitudes of the input (A_k^in)."""

from __future__ import annotations

import numpy as np

from vocal_timbre_fx.config import HarmonicConfig
from vocal_timbre_fx.errors import AnalysisError
from vocal_timbre_fx.features.framing import frame_count, hop_size, stft_magnitude
from vocal_timbre_fx.models import AudioClip, FeatureTrack, HarmonicTrack


def extract_input_harmonics(
    clip: AudioClip,
    track: FeatureTrack,
    n_harmonics: int,
    cfg: HarmonicConfig = HarmonicConfig(),
) -> HarmonicTrack:
    """Sample the STFT magnitude at k * f0 for every voiced frame.

    Parameters
    ----------
    clip:
        Clip the track was extracted from.
    track:
        Pitch track; frames with f0 == 0 are unvoiced.
    n_harmonics:
        Number of harmonics K to measure.
    cfg:
        FFT size of the analysis.

    Returns
    -------
    HarmonicTrack
        Rows normalized to unit sum; unvoiced frames and harmonics at or above
        Nyquist are exactly zero.
    """
    if n_harmonics < 1:
        raise AnalysisError(f"Harmonic count must be >= 1, got {n_harmonics}.")
    if track.f0 is None:
        raise AnalysisError("Harmonic measurement needs a track with f0 filled.")
    hop = hop_size(clip.sample_rate, track.frame_rate)
    n_frames = frame_count(len(clip), hop)
    if n_frames != track.n_frames:
        raise AnalysisError(f"Clip frames ({n_frames}) do not match the feature track ({track.n_frames}).")

    n_fft = cfg.n_fft
    magnitude = stft_magnitude(clip.samples, hop, n_fft)
    nyquist = clip.sample_rate / 2.0
    harmonic_numbers = np.arange(1, n_harmonics + 1)

    amplitudes = np.zeros((n_frames, n_harmonics))
    for i, f0 in enumerate(track.f0):
        if f0 <= 0:
            continue
        freqs = harmonic_numbers * f0
        audible = freqs < nyquist
        bins = freqs[audible] * n_fft / clip.sample_rate
        row = np.zeros(n_harmonics)
        row[audible] = np.interp(bins, np.arange(magnitude.shape[1]), magnitude[i])
        total = row.sum()
        if total > 0:
            amplitudes[i] = row / total
    return HarmonicTrack(amplitudes=amplitudes, frame_rate=track.frame_rate)
