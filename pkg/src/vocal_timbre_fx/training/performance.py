"""Synthetic instrument performances: random MIDI notes rendered with the synthesizer.

Useful as an instrument set for mixed-dataset training when no recordings are at hand.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List

import librosa
import numpy as np

from vocal_timbre_fx.config import PipelineConfig
from vocal_timbre_fx.errors import ConfigurationError
from vocal_timbre_fx.models import AudioClip, SynthControls
from vocal_timbre_fx.synth.interpolation import nyquist_mask
from vocal_timbre_fx.synth.render import render

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Note:
    pitch: int
    velocity: int
    start: int
    stop: int


@dataclass(frozen=True)
class PerformanceStyle:
    """Ranges the random note sequencer draws from (frames are at the pipeline frame rate)."""

    lowest_pitch: int = 48
    highest_pitch: int = 72
    min_note_seconds: float = 0.2
    max_note_seconds: float = 1.0
    max_rest_seconds: float = 0.25
    min_velocity: int = 40
    max_velocity: int = 127
    attack_seconds: float = 0.02
    release_seconds: float = 0.08
    rolloff: float = 1.0
    noise_level: float = 0.02


def sequence_notes(n_frames: int, frame_rate: float, rng: np.random.Generator, style: PerformanceStyle) -> List[Note]:
    notes = []
    frame = 0
    while frame < n_frames:
        length = int(rng.uniform(style.min_note_seconds, style.max_note_seconds) * frame_rate)
        rest = int(rng.uniform(0.0, style.max_rest_seconds) * frame_rate)
        notes.append(
            Note(
                pitch=int(rng.integers(style.lowest_pitch, style.highest_pitch + 1)),
                velocity=int(rng.integers(style.min_velocity, style.max_velocity + 1)),
                start=frame,
                stop=min(frame + max(length, 1), n_frames),
            )
        )
        frame += max(length, 1) + rest
    return notes


def render_random_performance(
    seconds: float, seed: int, cfg: PipelineConfig, style: PerformanceStyle = PerformanceStyle()
) -> AudioClip:
    """Render `seconds` of randomly sequenced notes at varying pitches and velocities."""
    if seconds <= 0:
        raise ConfigurationError(f"Performance length must be positive, got {seconds}.")
    rng = np.random.default_rng(seed)
    n_frames = max(1, int(round(seconds * cfg.frame_rate)))
    notes = sequence_notes(n_frames, cfg.frame_rate, rng, style)

    f0 = np.zeros(n_frames)
    amplitude = np.zeros(n_frames)
    attack = max(1, int(style.attack_seconds * cfg.frame_rate))
    release = max(1, int(style.release_seconds * cfg.frame_rate))
    for note in notes:
        span = note.stop - note.start
        envelope = np.minimum(1.0, np.minimum(np.arange(1, span + 1) / attack, np.arange(span, 0, -1) / release))
        f0[note.start : note.stop] = librosa.midi_to_hz(note.pitch)
        amplitude[note.start : note.stop] = 0.5 * (note.velocity / 127.0) ** 2 * envelope

    # keep pitch through rests so the oscillators do not jump to 0 Hz
    held = np.maximum.accumulate(np.where(f0 > 0, np.arange(n_frames), 0))
    f0 = f0[held]
    f0[f0 == 0] = librosa.midi_to_hz(style.lowest_pitch)

    n_harmonics = cfg.synth.n_harmonics
    profile = 1.0 / np.arange(1, n_harmonics + 1) ** style.rolloff
    harmonics = np.where(nyquist_mask(f0, n_harmonics, cfg.sample_rate), profile, 0.0)
    harmonics /= harmonics.sum(axis=1, keepdims=True)
    noise = np.repeat((style.noise_level * amplitude)[:, None], cfg.synth.noise_bins, axis=1)

    controls = SynthControls(amplitude=amplitude, harmonics=harmonics, noise_mags=noise, frame_rate=cfg.frame_rate)
    logger.debug("Rendering %d notes over %d frames", len(notes), n_frames)
    return render(f0, controls, cfg.sample_rate, seed)
