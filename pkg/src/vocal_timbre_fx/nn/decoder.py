"""Pitch/loudness (and optional z) conditioned decoder predicting synthesizer controls."""

from __future__ import annotations

from typing import Dict, Optional, Tuple

import librosa
import numpy as np

from vocal_timbre_fx.autodiff import ops
from vocal_timbre_fx.autodiff.tape import ArrayLike
from vocal_timbre_fx.errors import ShapeError
from vocal_timbre_fx.models import SynthControls
from vocal_timbre_fx.nn.architecture import Architecture, NormalizationStats
from vocal_timbre_fx.nn.layers import (
    Params,
    Shapes,
    dense,
    dense_shapes,
    dense_stack,
    dense_stack_shapes,
    exp_sigmoid,
    gru,
    gru_shapes,
    init_params,
)

PREFIX = "decoder"
MIN_F0_HZ = 1.0


def decoder_param_shapes(arch: Architecture) -> Shapes:
    h = arch.hidden_size
    inputs = ["f0", "loudness"] + (["z"] if arch.has_latent else [])
    shapes: Shapes = {}
    for name in inputs:
        n_in = arch.latent_size if name == "z" else 1
        shapes.update(dense_stack_shapes(f"{PREFIX}.{name}", n_in, h))
    shapes.update(gru_shapes(f"{PREFIX}.gru", len(inputs) * h, h))
    shapes.update(dense_stack_shapes(f"{PREFIX}.out", h, h, n_layers=1))
    shapes.update(dense_shapes(f"{PREFIX}.amplitude", h, 1))
    shapes.update(dense_shapes(f"{PREFIX}.harmonics", h, arch.n_harmonics))
    shapes.update(dense_shapes(f"{PREFIX}.noise", h, arch.noise_bins))
    return shapes


def init_decoder_params(arch: Architecture, seed: int) -> Dict[str, np.ndarray]:
    return init_params(decoder_param_shapes(arch), np.random.default_rng(seed))


def condition_inputs(
    f0_hz: np.ndarray, loudness_db: np.ndarray, stats: NormalizationStats
) -> Tuple[np.ndarray, np.ndarray]:
    """Scaled MIDI pitch and standardized loudness, each shaped [frames, 1]."""
    midi = librosa.hz_to_midi(np.maximum(np.asarray(f0_hz, dtype=np.float64), MIN_F0_HZ))
    pitch = np.asarray(midi, dtype=np.float64) / stats.f0_scale
    loudness = (np.asarray(loudness_db, dtype=np.float64) - stats.loudness_mean) / stats.loudness_std
    return pitch[:, None], loudness[:, None]


def decoder_forward(
    params: Params,
    arch: Architecture,
    stats: NormalizationStats,
    f0_hz: np.ndarray,
    loudness_db: np.ndarray,
    frame_rate: float,
    z: Optional[ArrayLike] = None,
) -> SynthControls:
    """Predict per-frame synthesizer controls.

    Parameters
    ----------
    params:
        Decoder parameters (arrays or watched tensors).
    f0_hz, loudness_db:
        Conditioning tracks of equal length. Unvoiced frames should carry a held f0.
    z:
        Latent frames [frames, latent_size]; required exactly when the
        architecture has a latent.

    Returns
    -------
    SynthControls
        `amplitude` and `noise_mags` strictly positive, `harmonics` rows on the simplex.

    Raises
    ------
    ShapeError
        On frame-count mismatches or a latent that does not fit the architecture.
    """
    n_frames = len(f0_hz)
    if len(loudness_db) != n_frames:
        raise ShapeError(f"f0 has {n_frames} frames but loudness has {len(loudness_db)}.")
    if arch.has_latent != (z is not None):
        raise ShapeError(
            "This decoder takes a latent z." if arch.has_latent else "z supplied to a decoder without a latent."
        )
    if z is not None and tuple(z.shape) != (n_frames, arch.latent_size):
        raise ShapeError(f"z must be shaped ({n_frames}, {arch.latent_size}), got {tuple(z.shape)}.")

    pitch, loudness = condition_inputs(f0_hz, loudness_db, stats)
    stacks = [
        dense_stack(params, f"{PREFIX}.f0", pitch),
        dense_stack(params, f"{PREFIX}.loudness", loudness),
    ]
    if z is not None:
        stacks.append(dense_stack(params, f"{PREFIX}.z", z))

    hidden = gru(params, f"{PREFIX}.gru", ops.concat(stacks, axis=-1))
    hidden = dense_stack(params, f"{PREFIX}.out", hidden, n_layers=1)

    amplitude = exp_sigmoid(dense(params, f"{PREFIX}.amplitude", hidden))
    harmonics = ops.softmax(dense(params, f"{PREFIX}.harmonics", hidden), axis=-1)
    noise_mags = exp_sigmoid(dense(params, f"{PREFIX}.noise", hidden))
    return SynthControls(
        amplitude=ops.reshape(amplitude, (n_frames,)),
        harmonics=harmonics,
        noise_mags=noise_mags,
        frame_rate=frame_rate,
    )
