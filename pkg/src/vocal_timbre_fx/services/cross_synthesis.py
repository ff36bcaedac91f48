"""Vocoding effect: the decoder's harmonic distribution blended with the input's own."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Sequence, Union

from vocal_timbre_fx.audio import read_wav, write_wav
from vocal_timbre_fx.config import DEFAULT_CONFIG, PipelineConfig
from vocal_timbre_fx.errors import ConfigurationError, VocalFxError
from vocal_timbre_fx.features import hold_voiced_f0
from vocal_timbre_fx.inference import analyze_for_checkpoint, predict_controls
from vocal_timbre_fx.models import AudioClip, InterpolationFactor, SynthesisResult
from vocal_timbre_fx.nn.checkpoint import ModelCheckpoint, load_checkpoint
from vocal_timbre_fx.services import is_usage_error
from vocal_timbre_fx.synth.interpolation import interpolate_harmonics
from vocal_timbre_fx.synth.render import render

logger = logging.getLogger(__name__)


def cross_synthesize(
    clip: AudioClip,
    ckpt: ModelCheckpoint,
    p: Union[InterpolationFactor, float],
    seed: int = 0,
    cfg: PipelineConfig = DEFAULT_CONFIG,
) -> AudioClip:
    """Resynthesize `clip` with harmonics blended toward the ones measured in it.

    Raises
    ------
    ConfigurationError
        If `ckpt` is a latent model or `p` lies outside [0, 1].
    AnalysisError
        If the clip is too short for one analysis window.
    """
    factor = p if isinstance(p, InterpolationFactor) else InterpolationFactor(p)
    if ckpt.architecture.has_latent:
        raise ConfigurationError("Cross-synthesis needs a timbre-transfer checkpoint; this one has a latent encoder.")
    dump = analyze_for_checkpoint(clip, ckpt, cfg)
    f0 = hold_voiced_f0(dump.track.f0)
    controls = predict_controls(dump, ckpt, cfg.loudness.floor_db)
    blended = interpolate_harmonics(controls.harmonics, dump.harmonics.amplitudes, factor, f0, ckpt.sample_rate)
    return render(f0, controls.with_harmonics(blended), ckpt.sample_rate, seed)


def sweep_output_path(output_path: Path, p: float) -> Path:
    """`<stem>_p<value>.wav` next to `output_path`."""
    output_path = Path(output_path)
    return output_path.with_name(f"{output_path.stem}_p{p:g}{output_path.suffix or '.wav'}")


class CrossSynthesisService:
    """Runs the vocoding effect at one value of p or over a sweep."""

    def __init__(self, cfg: PipelineConfig) -> None:
        self._cfg = cfg

    def run(self, input_path: Path, checkpoint: Path, output_path: Path, p: float) -> SynthesisResult:
        return self.sweep(input_path, checkpoint, output_path, [p], single=True)

    def sweep(
        self,
        input_path: Path,
        checkpoint: Path,
        output_path: Path,
        values: Sequence[float],
        single: bool = False,
    ) -> SynthesisResult:
        """Render one output per value of p.

        With `single`, the output goes to `output_path` as given; otherwise each
        value gets its own `<stem>_p<value>` file.
        """
        try:
            factors = [InterpolationFactor(p) for p in values]
            if not factors:
                raise ConfigurationError("No values of p given.")
            clip = read_wav(input_path)
            ckpt = load_checkpoint(checkpoint)
            outputs: List[Path] = []
            for factor in factors:
                target = Path(output_path) if single else sweep_output_path(output_path, factor.p)
                write_wav(cross_synthesize(clip, ckpt, factor, seed=self._cfg.seed, cfg=self._cfg), target)
                outputs.append(target)
                logger.info("Cross-synthesized %s at p=%g -> %s", input_path, factor.p, target)
        except (VocalFxError, OSError) as e:
            return SynthesisResult(False, str(e), usage_error=is_usage_error(e))

        return SynthesisResult(True, f"Wrote {len(outputs)} file(s).", tuple(outputs))
