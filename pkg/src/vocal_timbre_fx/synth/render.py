"""Harmonic plus noise rendering."""

from __future__ import annotations

from vocal_timbre_fx.autodiff import Tensor, value_of
from vocal_timbre_fx.autodiff.tape import ArrayLike
from vocal_timbre_fx.errors import ShapeError
from vocal_timbre_fx.models import AudioClip, SynthControls
from vocal_timbre_fx.synth.controls import control_hop
from vocal_timbre_fx.synth.harmonic import controls_as_arrays, harmonic_signal
from vocal_timbre_fx.synth.noise import noise_signal


def render_signal(f0_frames: ArrayLike, controls: SynthControls, sample_rate: int, seed: int) -> Tensor:
    """Harmonic and noise paths summed samplewise; `frames * hop` samples."""
    if controls.n_noise_bins < 2:
        raise ShapeError("Controls need at least 2 noise magnitude bins.")
    hop = control_hop(controls, sample_rate)
    return harmonic_signal(f0_frames, controls, sample_rate) + noise_signal(controls.noise_mags, hop, seed)


def render(f0_frames: ArrayLike, controls: SynthControls, sample_rate: int, seed: int) -> AudioClip:
    return AudioClip(render_signal(value_of(f0_frames), controls_as_arrays(controls), sample_rate, seed).data, sample_rate)
