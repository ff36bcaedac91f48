"""Frame-rate to sample-rate control conversion."""

from __future__ import annotations

from vocal_timbre_fx.autodiff import Tensor, ops
from vocal_timbre_fx.autodiff.tape import ArrayLike
from vocal_timbre_fx.errors import ConfigurationError, ShapeError
from vocal_timbre_fx.models import SynthControls


def upsample_controls(frame_values: ArrayLike, hop: int) -> Tensor:
    """Linearly interpolate between frame centers; frame i sits on sample i * hop.

    Output has `frames * hop` rows. Samples after the last frame center hold its value.
    """
    if hop < 1:
        raise ConfigurationError(f"hop must be >= 1, got {hop}.")
    n_frames = frame_values.shape[0] if hasattr(frame_values, "shape") else len(frame_values)
    if n_frames == 0:
        raise ShapeError("Cannot upsample an empty control sequence.")
    return ops.upsample(frame_values, hop, 0, n_frames * hop)


def control_hop(controls: SynthControls, sample_rate: int) -> int:
    """Samples per control frame; the frame rate must divide the sample rate."""
    hop = sample_rate / controls.frame_rate
    if hop != int(hop) or hop < 1:
        raise ConfigurationError(f"Frame rate {controls.frame_rate} does not divide sample rate {sample_rate}.")
    return int(hop)
