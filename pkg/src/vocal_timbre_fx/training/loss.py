"""Multi-scale spectral loss."""

from __future__ import annotations

from typing import Union

import numpy as np

from vocal_timbre_fx.autodiff import Tensor, ops
from vocal_timbre_fx.config import LossConfig
from vocal_timbre_fx.errors import ConfigurationError, ShapeError
from vocal_timbre_fx.features.framing import hann
from vocal_timbre_fx.models import AudioClip

Signal = Union[AudioClip, Tensor, np.ndarray]


def spectrogram_magnitude(signal: Union[Tensor, np.ndarray], n_fft: int, overlap: float) -> Tensor:
    """|STFT| with a periodic Hann window, frames at hop n_fft * (1 - overlap)."""
    hop = max(1, int(round(n_fft * (1.0 - overlap))))
    frames = ops.frame(signal, n_fft, hop) * hann(n_fft)
    return ops.magnitude(frames)


def multiscale_spectral_loss(pred: Signal, target: Signal, cfg: LossConfig = LossConfig()) -> Tensor:
    """Sum over FFT sizes of mean L1 distances between linear and log magnitudes.

    FFT sizes longer than the signal are skipped. The target is treated as a
    constant; gradients flow into `pred` only.

    Raises
    ------
    ShapeError
        If the signals differ in length or are shorter than every FFT size.
    ConfigurationError
        If both are clips with different sample rates.
    """
    if isinstance(pred, AudioClip) and isinstance(target, AudioClip) and pred.sample_rate != target.sample_rate:
        raise ConfigurationError(f"Sample rates differ: {pred.sample_rate} vs {target.sample_rate}.")
    pred_signal = pred.samples if isinstance(pred, AudioClip) else pred
    target_signal = target.samples if isinstance(target, AudioClip) else target
    target_signal = target_signal.data if isinstance(target_signal, Tensor) else np.asarray(target_signal, dtype=np.float64)

    length = pred_signal.shape[0]
    if target_signal.shape[0] != length:
        raise ShapeError(f"Loss inputs differ in length: {length} vs {target_signal.shape[0]}.")
    sizes = [n for n in cfg.fft_sizes if n <= length]
    if not sizes:
        raise ShapeError(f"Signal of {length} samples is shorter than every FFT size {cfg.fft_sizes}.")

    total: Union[Tensor, float] = 0.0
    for n_fft in sizes:
        mag_pred = spectrogram_magnitude(pred_signal, n_fft, cfg.overlap)
        mag_target = spectrogram_magnitude(target_signal, n_fft, cfg.overlap).data
        linear = ops.mean(ops.abs(mag_pred - mag_target))
        log_diff = ops.log(mag_pred + cfg.eps) - np.log(mag_target + cfg.eps)
        total = linear + cfg.log_weight * ops.mean(ops.abs(log_diff)) + total
    return total
