"""Frame layout shared by every analysis stage.

Frame i is centered on sample i * hop; a clip of n samples holds n // hop frames,
which is exactly the frame count the synthesizers turn back into n // hop * hop
samples.
"""

from __future__ import annotations

import librosa
import numpy as np
from scipy.signal import get_window

from vocal_timbre_fx.errors import AnalysisError


def frame_count(n_samples: int, hop: int) -> int:
    """Number of analysis frames for a clip of `n_samples`."""
    return n_samples // hop


def hann(n: int) -> np.ndarray:
    """Periodic Hann window of length `n`."""
    return get_window("hann", n, fftbins=True)


def stft(samples: np.ndarray, hop: int, n_fft: int) -> np.ndarray:
    """Hann-windowed spectra of zero-padded frames centered on multiples of `hop`.

    Returns
    -------
    np.ndarray
        Complex array of shape [n_frames, n_fft // 2 + 1].
    """
    n_frames = frame_count(samples.shape[0], hop)
    if n_frames == 0:
        raise AnalysisError(f"Clip of {samples.shape[0]} samples is shorter than one hop ({hop}).")
    spectra = librosa.stft(
        np.asarray(samples, dtype=np.float64),
        n_fft=n_fft,
        hop_length=hop,
        window="hann",
        center=True,
        pad_mode="constant",
    )
    # librosa emits 1 + n // hop frames; the extra one is dropped.
    return spectra[:, :n_frames].T


def stft_magnitude(samples: np.ndarray, hop: int, n_fft: int) -> np.ndarray:
    return np.abs(stft(samples, hop, n_fft))


def stft_power(samples: np.ndarray, hop: int, n_fft: int) -> np.ndarray:
    return stft_magnitude(samples, hop, n_fft) ** 2


def hop_size(sample_rate: int, frame_rate: float) -> int:
    """Samples per frame; the frame rate must divide the sample rate."""
    hop = sample_rate / frame_rate
    if hop != int(hop) or hop < 1:
        raise AnalysisError(f"frame_rate {frame_rate} does not divide sample rate {sample_rate}.")
    return int(hop)
