"""Analysis-side signals: pitch, loudness, MFCCs and input harmonics."""

from __future__ import annotations

from vocal_timbre_fx.audio.wav import resample
from vocal_timbre_fx.config import PipelineConfig
from vocal_timbre_fx.features.container import load_features, save_features
from vocal_timbre_fx.features.harmonics import extract_input_harmonics
from vocal_timbre_fx.features.loudness import extract_loudness
from vocal_timbre_fx.features.mfcc import extract_mfcc
from vocal_timbre_fx.features.pitch import extract_pitch, hold_voiced_f0
from vocal_timbre_fx.models import AudioClip, FeatureDump


def analyze(clip: AudioClip, cfg: PipelineConfig) -> FeatureDump:
    """Resample `clip` to the model rate and run every extractor on it."""
    clip = resample(clip, cfg.sample_rate)
    track = extract_pitch(clip, cfg.pitch, cfg.frame_rate)
    track = track.merge(extract_loudness(clip, cfg.loudness, cfg.frame_rate))
    return FeatureDump(
        track=track,
        mfcc=extract_mfcc(clip, cfg.mfcc, cfg.frame_rate),
        harmonics=extract_input_harmonics(clip, track, cfg.synth.n_harmonics, cfg.harmonics),
        sample_rate=clip.sample_rate,
    )


__all__ = [
    "analyze",
    "extract_pitch",
    "extract_loudness",
    "extract_mfcc",
    "extract_input_harmonics",
    "hold_voiced_f0",
    "save_features",
    "load_features",
]
