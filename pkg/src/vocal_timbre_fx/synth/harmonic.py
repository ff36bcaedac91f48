"""Additive oscillator bank driven by f0 and a harmonic distribution."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from vocal_timbre_fx.autodiff import Tensor, current_tape, ops, value_of
from vocal_timbre_fx.autodiff.tape import ArrayLike
from vocal_timbre_fx.errors import DomainError, ShapeError
from vocal_timbre_fx.models import AudioClip, SynthControls
from vocal_timbre_fx.synth.controls import control_hop

TWO_PI = 2.0 * np.pi
BLOCK_SIZE = 8192


def harmonic_signal(f0_frames: ArrayLike, controls: SynthControls, sample_rate: int) -> Tensor:
    """Sum of K sinusoids at integer multiples of f0, as a tensor of `frames * hop` samples.

    Phase is the running sum of the per-sample angular increment 2 pi f0 / fs,
    starting from zero and wrapped to [0, 2 pi). Harmonic k is muted on every
    sample where k * f0 >= fs / 2; the remaining amplitudes are not renormalized.

    With no active tape the signal is produced in blocks of `BLOCK_SIZE` samples,
    carrying the phase across block edges, so memory stays bounded for long clips.
    """
    f0 = value_of(f0_frames)
    if f0.ndim != 1 or f0.shape[0] != controls.n_frames:
        raise ShapeError(f"f0 has shape {f0.shape} but the controls have {controls.n_frames} frames.")
    if np.any(f0 < 0):
        raise DomainError("f0 must be non-negative.")
    hop = control_hop(controls, sample_rate)
    n_samples = controls.n_frames * hop

    if current_tape() is not None:
        signal, _ = _render_span(f0_frames, controls, sample_rate, hop, 0, n_samples, 0.0)
        return signal

    blocks = []
    phase = 0.0
    for start in range(0, n_samples, BLOCK_SIZE):
        block, phase = _render_span(f0, controls, sample_rate, hop, start, min(start + BLOCK_SIZE, n_samples), phase)
        blocks.append(block.data)
    return Tensor(np.concatenate(blocks))


def _render_span(
    f0_frames: ArrayLike,
    controls: SynthControls,
    sample_rate: int,
    hop: int,
    start: int,
    stop: int,
    initial_phase: float,
) -> Tuple[Tensor, float]:
    n_harmonics = controls.n_harmonics
    length = stop - start
    f0 = ops.upsample(f0_frames, hop, start, stop)
    amplitude = ops.upsample(controls.amplitude, hop, start, stop)
    harmonics = ops.upsample(controls.harmonics, hop, start, stop)

    phase = ops.cumsum(f0 * (TWO_PI / sample_rate)) + initial_phase
    phase = phase - TWO_PI * np.floor(phase.data / TWO_PI)

    numbers = np.arange(1, n_harmonics + 1, dtype=np.float64)
    audible = (f0.data[:, None] * numbers[None, :] < sample_rate / 2.0).astype(np.float64)
    phases = ops.broadcast(ops.reshape(phase, (length, 1)), (length, n_harmonics)) * numbers

    bank = ops.sum(harmonics * audible * ops.sin(phases), axis=-1)
    return amplitude * bank, float(phase.data[-1])


def harmonic_synth(f0_frames: ArrayLike, controls: SynthControls, sample_rate: int) -> AudioClip:
    """Render the harmonic path to a clip."""
    return AudioClip(harmonic_signal(value_of(f0_frames), controls_as_arrays(controls), sample_rate).data, sample_rate)


def controls_as_arrays(controls: SynthControls) -> SynthControls:
    return SynthControls(
        amplitude=value_of(controls.amplitude),
        harmonics=value_of(controls.harmonics),
        noise_mags=value_of(controls.noise_mags),
        frame_rate=controls.frame_rate,
    )
