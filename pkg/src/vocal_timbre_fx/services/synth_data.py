"""`synth-data` workflow: write random synthesizer performances as an instrument dataset."""

from __future__ import annotations

import logging
from pathlib import Path

from vocal_timbre_fx.audio import write_wav
from vocal_timbre_fx.config import PipelineConfig
from vocal_timbre_fx.errors import ConfigurationError, VocalFxError
from vocal_timbre_fx.models import SynthesisResult
from vocal_timbre_fx.services import is_usage_error
from vocal_timbre_fx.training import render_random_performance

logger = logging.getLogger(__name__)


class SynthDataService:
    def __init__(self, cfg: PipelineConfig) -> None:
        self._cfg = cfg

    def generate(self, out_dir: Path, count: int, seconds: float) -> SynthesisResult:
        """Write `count` clips named `performance_<i>.wav`, seeded from the config seed."""
        try:
            if count < 1:
                raise ConfigurationError(f"count must be >= 1, got {count}.")
            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            outputs = []
            for i in range(count):
                path = out_dir / f"performance_{i:03d}.wav"
                write_wav(render_random_performance(seconds, self._cfg.seed + i, self._cfg), path)
                outputs.append(path)
        except (VocalFxError, OSError) as e:
            return SynthesisResult(False, str(e), usage_error=is_usage_error(e))

        logger.info("Wrote %d performances to %s", count, out_dir)
        return SynthesisResult(True, f"Wrote {count} file(s) to {out_dir}.", tuple(outputs))
