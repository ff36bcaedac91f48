"""`resynth` workflow: WAV + checkpoint -> reconstruction or timbre transfer."""

from __future__ import annotations

import logging
from pathlib import Path

from vocal_timbre_fx.audio import read_wav, write_wav
from vocal_timbre_fx.config import PipelineConfig
from vocal_timbre_fx.errors import VocalFxError
from vocal_timbre_fx.inference import resynthesize
from vocal_timbre_fx.models import SynthesisResult
from vocal_timbre_fx.nn.checkpoint import load_checkpoint
from vocal_timbre_fx.services import is_usage_error

logger = logging.getLogger(__name__)


class ResynthesisService:
    def __init__(self, cfg: PipelineConfig) -> None:
        self._cfg = cfg

    def resynthesize(self, input_path: Path, checkpoint: Path, output_path: Path) -> SynthesisResult:
        try:
            clip = read_wav(input_path)
            ckpt = load_checkpoint(checkpoint)
            output = resynthesize(clip, ckpt, seed=self._cfg.seed, cfg=self._cfg)
            write_wav(output, output_path)
        except (VocalFxError, OSError) as e:
            return SynthesisResult(False, str(e), usage_error=is_usage_error(e))

        logger.info("Resynthesized %s with checkpoint step %d", input_path, ckpt.step)
        return SynthesisResult(True, f"Wrote {output_path}.", (Path(output_path),))
