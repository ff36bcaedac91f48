"""Time-varying FIR-filtered noise."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.signal import get_window

from vocal_timbre_fx.autodiff import Tensor, ops, value_of
from vocal_timbre_fx.autodiff.tape import ArrayLike
from vocal_timbre_fx.errors import ShapeError
from vocal_timbre_fx.models import AudioClip


@lru_cache(maxsize=8)
def frequency_sampling_basis(n_bins: int) -> np.ndarray:
    """Map from B magnitude samples to linear-phase FIR taps, shape [B, 2(B-1)+1].

    Row j is the impulse response of a unit magnitude at bin j alone: inverse
    real FFT of length 2(B-1), rotated so lag zero sits in the middle, extended
    to odd length and tapered by a symmetric Hann window.
    """
    n_fft = 2 * (n_bins - 1)
    impulses = np.fft.irfft(np.eye(n_bins), n=n_fft, axis=-1)
    impulses = np.roll(impulses, n_fft // 2, axis=-1)
    impulses = np.concatenate([impulses, impulses[:, :1]], axis=-1)
    basis = impulses * get_window("hann", n_fft + 1, fftbins=False)
    basis.setflags(write=False)
    return basis


def noise_signal(noise_mags: ArrayLike, hop: int, seed: int) -> Tensor:
    """Filter seeded white noise with one FIR per frame and overlap-add at 50%.

    Each frame owns a Hann-windowed noise segment of `2 * hop` samples centered
    on its frame center; the last frame's filter is held for one extra segment
    so the tail is fully covered. Output has `frames * hop` samples.
    """
    shape = tuple(noise_mags.shape)
    if len(shape) != 2:
        raise ShapeError(f"noise magnitudes must be [frames, bins], got {shape}.")
    n_frames, n_bins = shape
    if n_bins < 2:
        raise ShapeError(f"Need at least 2 noise magnitude bins (0 Hz and Nyquist), got {n_bins}.")
    if n_frames == 0:
        raise ShapeError("Cannot synthesize noise for zero frames.")

    basis = frequency_sampling_basis(n_bins)
    taps = ops.matmul(noise_mags, basis)
    taps = ops.concat([taps, taps[-1:, :]], axis=0)

    rng = np.random.default_rng(seed)
    segments = rng.uniform(-1.0, 1.0, size=(n_frames + 1, 2 * hop)) * get_window("hann", 2 * hop)

    filtered = ops.convolve(segments, taps)
    signal = ops.overlap_add(filtered, hop)
    start = hop + (basis.shape[1] - 1) // 2
    return signal[start : start + n_frames * hop]


def noise_synth(noise_mags: ArrayLike, hop: int, seed: int, sample_rate: int) -> AudioClip:
    """Render the noise path to a clip."""
    return AudioClip(noise_signal(value_of(noise_mags), hop, seed).data, sample_rate)
