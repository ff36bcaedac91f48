"""Blend of predicted and measured harmonic distributions for the vocoding effect."""

from __future__ import annotations

from typing import Union

import numpy as np

from vocal_timbre_fx.errors import DomainError, ShapeError
from vocal_timbre_fx.models import InterpolationFactor


def nyquist_mask(f0_frames: np.ndarray, n_harmonics: int, sample_rate: int) -> np.ndarray:
    """True where harmonic k of frame n lies strictly below fs / 2, shape [frames, K]."""
    numbers = np.arange(1, n_harmonics + 1)
    return np.asarray(f0_frames, dtype=np.float64)[:, None] * numbers[None, :] < sample_rate / 2.0


def interpolate_harmonics(
    predicted: np.ndarray,
    measured: np.ndarray,
    p: Union[InterpolationFactor, float],
    f0_frames: np.ndarray,
    sample_rate: int,
) -> np.ndarray:
    """Return ``(1 - p) * predicted + p * measured`` below Nyquist and 0 above.

    Parameters
    ----------
    predicted:
        Decoder harmonic distribution A_k, shape [frames, K].
    measured:
        Input harmonics A_k^in of the same shape; unit-sum or all-zero rows.
    p:
        Interpolation factor in [0, 1]. p = 0 keeps the prediction, p = 1 the
        measurement.
    f0_frames:
        Pitch per frame in Hz.
    sample_rate:
        Output rate fixing the Nyquist limit.

    Notes
    -----
    Masked energy is dropped; rows are not renormalized.
    """
    factor = p if isinstance(p, InterpolationFactor) else InterpolationFactor(p)
    predicted = np.asarray(predicted, dtype=np.float64)
    measured = np.asarray(measured, dtype=np.float64)
    if predicted.ndim != 2 or predicted.shape != measured.shape:
        raise ShapeError(f"Harmonic matrices must share a 2-D shape, got {predicted.shape} and {measured.shape}.")
    if len(f0_frames) != predicted.shape[0]:
        raise ShapeError(f"{len(f0_frames)} f0 frames for {predicted.shape[0]} harmonic rows.")
    if np.any(predicted < 0) or np.any(measured < 0):
        raise DomainError("Harmonic amplitudes must be non-negative.")

    blended = (1.0 - factor.p) * predicted + factor.p * measured
    return np.where(nyquist_mask(f0_frames, predicted.shape[1], sample_rate), blended, 0.0)
