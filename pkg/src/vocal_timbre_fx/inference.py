"""Running a trained checkpoint on new audio."""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from vocal_timbre_fx.audio import resample
from vocal_timbre_fx.config import DEFAULT_CONFIG, PipelineConfig, with_overrides
from vocal_timbre_fx.features import analyze, hold_voiced_f0
from vocal_timbre_fx.models import AudioClip, FeatureDump, SynthControls
from vocal_timbre_fx.nn.checkpoint import ModelCheckpoint
from vocal_timbre_fx.nn.decoder import decoder_forward
from vocal_timbre_fx.nn.encoder import encoder_forward
from vocal_timbre_fx.synth.harmonic import controls_as_arrays
from vocal_timbre_fx.synth.interpolation import nyquist_mask
from vocal_timbre_fx.synth.render import render

logger = logging.getLogger(__name__)


def config_for_checkpoint(ckpt: ModelCheckpoint, cfg: PipelineConfig = DEFAULT_CONFIG) -> PipelineConfig:
    """`cfg` with rates and sizes taken from the checkpoint."""
    arch = ckpt.architecture
    cfg = with_overrides(cfg, sample_rate=ckpt.sample_rate, frame_rate=ckpt.frame_rate)
    cfg = with_overrides(cfg, "synth", n_harmonics=arch.n_harmonics, noise_bins=arch.noise_bins)
    return with_overrides(cfg, "mfcc", n_mfcc=arch.n_mfcc)


def analyze_for_checkpoint(clip: AudioClip, ckpt: ModelCheckpoint, cfg: PipelineConfig = DEFAULT_CONFIG) -> FeatureDump:
    return analyze(resample(clip, ckpt.sample_rate), config_for_checkpoint(ckpt, cfg))


def predict_controls(
    dump: FeatureDump, ckpt: ModelCheckpoint, floor_db: float = DEFAULT_CONFIG.loudness.floor_db
) -> SynthControls:
    """Decoder controls for an analyzed clip.

    Harmonics above Nyquist are zeroed per frame, and frames whose loudness sits
    on the `floor_db` clamp (digital silence) get zero amplitude and noise.
    """
    arch = ckpt.architecture
    f0 = hold_voiced_f0(dump.track.f0)
    z = encoder_forward(ckpt.params, arch, dump.mfcc) if arch.has_latent else None
    controls = controls_as_arrays(
        decoder_forward(ckpt.params, arch, ckpt.stats, f0, dump.track.loudness, ckpt.frame_rate, z)
    )
    mask = nyquist_mask(f0, arch.n_harmonics, ckpt.sample_rate)
    audible = np.asarray(dump.track.loudness) > floor_db
    return SynthControls(
        amplitude=np.where(audible, controls.amplitude, 0.0),
        harmonics=np.where(mask, controls.harmonics, 0.0),
        noise_mags=np.where(audible[:, None], controls.noise_mags, 0.0),
        frame_rate=controls.frame_rate,
    )


def resynthesize(
    clip: AudioClip,
    ckpt: ModelCheckpoint,
    seed: int = 0,
    cfg: PipelineConfig = DEFAULT_CONFIG,
    dump: Optional[FeatureDump] = None,
) -> AudioClip:
    """Reconstruction (latent models) or timbre transfer (pitch/loudness models) of `clip`."""
    dump = analyze_for_checkpoint(clip, ckpt, cfg) if dump is None else dump
    controls = predict_controls(dump, ckpt, cfg.loudness.floor_db)
    logger.debug("Resynthesizing %d frames with a %s model", dump.n_frames, ckpt.architecture.kind)
    return render(hold_voiced_f0(dump.track.f0), controls, ckpt.sample_rate, seed)
