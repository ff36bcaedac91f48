"""YIN fundamental-frequency tracking."""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from vocal_timbre_fx.config import PitchConfig
from vocal_timbre_fx.errors import AnalysisError
from vocal_timbre_fx.features.framing import frame_count, hop_size
from vocal_timbre_fx.models import AudioClip, FeatureTrack

DEFAULT_F0_HZ = 440.0
_SILENCE_POWER = 1e-10


def extract_pitch(clip: AudioClip, cfg: PitchConfig = PitchConfig(), frame_rate: float = 250) -> FeatureTrack:
    """Estimate f0 and voicing confidence per frame.

    Parameters
    ----------
    clip:
        Mono clip at the model rate.
    cfg:
        Search range, window length and YIN threshold.
    frame_rate:
        Output frames per second; must divide the sample rate.

    Returns
    -------
    FeatureTrack
        Track with `f0` (0 where unvoiced) and `confidence` filled.

    Raises
    ------
    AnalysisError
        If the clip is shorter than one analysis window.

    Notes
    -----
    Windows that would reach past either end of the clip are shifted inward so
    every estimate sees a full window of signal.
    """
    hop = hop_size(clip.sample_rate, frame_rate)
    width = cfg.frame_length
    n = len(clip)
    if n < width:
        raise AnalysisError(f"Clip of {n} samples is shorter than the {width}-sample pitch window.")

    n_frames = frame_count(n, hop)
    starts = np.clip(np.arange(n_frames) * hop - width // 2, 0, n - width)
    frames = sliding_window_view(clip.samples, width)[starts]

    sr = clip.sample_rate
    tau_max = min(int(math.ceil(sr / cfg.f0_min)), width // 2)
    tau_min = max(2, int(math.ceil(sr / cfg.f0_max)))
    cmnd = cumulative_mean_normalized_difference(frames, tau_max)
    power = np.mean(frames[:, : width - tau_max] ** 2, axis=1)

    f0 = np.zeros(n_frames)
    confidence = np.zeros(n_frames)
    for i in range(n_frames):
        if power[i] < _SILENCE_POWER:
            continue
        tau, voiced = _pick_period(cmnd[i], tau_min, tau_max, cfg.threshold)
        confidence[i] = float(np.clip(1.0 - cmnd[i, tau], 0.0, 1.0))
        if voiced and cfg.f0_min <= sr / tau <= cfg.f0_max:
            # Refinement may step just past a range edge the integer lag sits on.
            f0[i] = float(np.clip(sr / _refine(cmnd[i], tau), cfg.f0_min, cfg.f0_max))
        else:
            confidence[i] = min(confidence[i], cfg.threshold)
    return FeatureTrack(frame_rate=frame_rate, f0=f0, confidence=confidence)


def cumulative_mean_normalized_difference(frames: np.ndarray, tau_max: int) -> np.ndarray:
    """YIN d'(tau) for tau in [0, tau_max] per frame.

    The difference function integrates over the first `width - tau_max` samples of
    each frame so every lag sees the same number of products.
    """
    width = frames.shape[1]
    span = width - tau_max
    n_fft = 1 << (width + span - 1).bit_length()
    head = np.fft.rfft(frames[:, :span], n_fft, axis=1)
    full = np.fft.rfft(frames, n_fft, axis=1)
    acf = np.fft.irfft(np.conj(head) * full, n_fft, axis=1)[:, : tau_max + 1]

    squares = np.concatenate([np.zeros((frames.shape[0], 1)), np.cumsum(frames**2, axis=1)], axis=1)
    lags = np.arange(tau_max + 1)
    energy = squares[:, lags + span] - squares[:, lags]
    diff = np.maximum(energy[:, :1] + energy - 2.0 * acf, 0.0)

    running = np.cumsum(diff[:, 1:], axis=1)
    out = np.ones_like(diff)
    with np.errstate(divide="ignore", invalid="ignore"):
        normalized = diff[:, 1:] * lags[1:] / running
    out[:, 1:] = np.where(running > 0, normalized, 1.0)
    return out


def _pick_period(cmnd: np.ndarray, tau_min: int, tau_max: int, threshold: float) -> tuple[int, bool]:
    """First dip below `threshold`, followed down to its local minimum."""
    search = cmnd[tau_min:tau_max]
    below = np.flatnonzero(search < threshold)
    if below.size == 0:
        return tau_min + int(np.argmin(search)), False
    tau = tau_min + int(below[0])
    while tau + 1 < tau_max and cmnd[tau + 1] < cmnd[tau]:
        tau += 1
    return tau, True


def _refine(cmnd: np.ndarray, tau: int) -> float:
    """Parabolic interpolation of the dip around integer lag `tau`."""
    if tau <= 0 or tau + 1 >= cmnd.shape[0]:
        return float(tau)
    a, b, c = cmnd[tau - 1], cmnd[tau], cmnd[tau + 1]
    denom = a - 2.0 * b + c
    if denom <= 0:
        return float(tau)
    return tau + 0.5 * (a - c) / denom


def hold_voiced_f0(f0: np.ndarray, default: float = DEFAULT_F0_HZ) -> np.ndarray:
    """Replace unvoiced (0 Hz) frames with the last voiced f0.

    Frames before the first voiced one take `default`.
    """
    held = np.asarray(f0, dtype=np.float64).copy()
    last = default
    for i, value in enumerate(held):
        if value > 0:
            last = value
        else:
            held[i] = last
    return held

