"""Differentiable harmonic and filtered-noise synthesizers."""

from vocal_timbre_fx.synth.controls import control_hop, upsample_controls
from vocal_timbre_fx.synth.harmonic import controls_as_arrays, harmonic_signal, harmonic_synth
from vocal_timbre_fx.synth.interpolation import interpolate_harmonics, nyquist_mask
from vocal_timbre_fx.synth.noise import frequency_sampling_basis, noise_signal, noise_synth
from vocal_timbre_fx.synth.render import render, render_signal

__all__ = [
    "control_hop",
    "upsample_controls",
    "controls_as_arrays",
    "harmonic_signal",
    "harmonic_synth",
    "interpolate_harmonics",
    "nyquist_mask",
    "frequency_sampling_basis",
    "noise_signal",
    "noise_synth",
    "render",
    "render_signal",
]
