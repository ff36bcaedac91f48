"""MFCC encoder: one GRU over the frames, then a projection to z."""

from __future__ import annotations

from typing import Dict

import numpy as np

from vocal_timbre_fx.autodiff import Tensor
from vocal_timbre_fx.errors import ConfigurationError, ShapeError
from vocal_timbre_fx.models import MfccTrack
from vocal_timbre_fx.nn.architecture import Architecture
from vocal_timbre_fx.nn.layers import Params, Shapes, dense, dense_shapes, gru, gru_shapes, init_params

PREFIX = "encoder"


def encoder_param_shapes(arch: Architecture) -> Shapes:
    if not arch.has_latent:
        raise ConfigurationError("A timbre-transfer architecture has no encoder.")
    shapes = gru_shapes(f"{PREFIX}.gru", arch.n_mfcc, arch.encoder_hidden_size)
    shapes.update(dense_shapes(f"{PREFIX}.latent", arch.encoder_hidden_size, arch.latent_size))
    return shapes


def init_encoder_params(arch: Architecture, seed: int) -> Dict[str, np.ndarray]:
    # offset keeps encoder draws independent of the decoder's
    return init_params(encoder_param_shapes(arch), np.random.default_rng(seed + 1))


def standardize_frames(coefficients: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Zero-mean, unit-variance MFCC rows; an all-zero row stays zero."""
    centered = coefficients - coefficients.mean(axis=-1, keepdims=True)
    return centered / np.sqrt(centered.var(axis=-1, keepdims=True) + eps)


def encoder_forward(params: Params, arch: Architecture, mfcc: MfccTrack) -> Tensor:
    """Latent frames z, shape [frames, latent_size]; deterministic."""
    if mfcc.coefficients.shape[1] != arch.n_mfcc:
        raise ShapeError(f"Encoder expects {arch.n_mfcc} MFCCs per frame, got {mfcc.coefficients.shape[1]}.")
    hidden = gru(params, f"{PREFIX}.gru", standardize_frames(mfcc.coefficients))
    return dense(params, f"{PREFIX}.latent", hidden)
