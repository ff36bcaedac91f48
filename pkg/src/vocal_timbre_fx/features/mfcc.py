"""Mel-frequency cepstral coefficients for the latent encoder."""

from __future__ import annotations

from functools import lru_cache

import librosa
import numpy as np
from scipy.fft import dct

from vocal_timbre_fx.config import MfccConfig
from vocal_timbre_fx.features.framing import hop_size, stft_power
from vocal_timbre_fx.models import AudioClip, MfccTrack


@lru_cache(maxsize=8)
def mel_filterbank(sample_rate: int, n_fft: int, n_mels: int) -> np.ndarray:
    """Slaney-normalized triangular mel filters, shape [n_mels, n_fft // 2 + 1]."""
    bank = librosa.filters.mel(sr=sample_rate, n_fft=n_fft, n_mels=n_mels, dtype=np.float64)
    bank.setflags(write=False)
    return bank


def extract_mfcc(clip: AudioClip, cfg: MfccConfig = MfccConfig(), frame_rate: float = 250) -> MfccTrack:
    """STFT power -> mel energies -> log -> orthonormal DCT-II, first `n_mfcc` kept."""
    hop = hop_size(clip.sample_rate, frame_rate)
    power = stft_power(clip.samples, hop, cfg.n_fft)
    mel = power @ mel_filterbank(clip.sample_rate, cfg.n_fft, cfg.n_mels).T
    log_mel = np.log(mel + cfg.log_floor)
    coeffs = dct(log_mel, type=2, axis=-1, norm="ortho")[:, : cfg.n_mfcc]
    return MfccTrack(coefficients=coeffs, frame_rate=frame_rate)
