"""`features` workflow: WAV -> feature dump."""

from __future__ import annotations

import logging
from pathlib import Path

from vocal_timbre_fx.audio import read_wav
from vocal_timbre_fx.config import PipelineConfig
from vocal_timbre_fx.errors import VocalFxError
from vocal_timbre_fx.features import analyze, save_features
from vocal_timbre_fx.models import FeatureExtractionResult
from vocal_timbre_fx.services import is_usage_error

logger = logging.getLogger(__name__)


class FeatureExtractionService:
    """Resamples a clip to the model rate and writes every extracted track."""

    def __init__(self, cfg: PipelineConfig) -> None:
        self._cfg = cfg

    def extract(self, input_path: Path, output_path: Path) -> FeatureExtractionResult:
        """Analyze `input_path` and write the dump to `output_path`.

        Returns
        -------
        FeatureExtractionResult
            Success/failure and the number of frames written.
        """
        try:
            dump = analyze(read_wav(input_path), self._cfg)
            save_features(dump, output_path)
        except (VocalFxError, OSError) as e:
            return FeatureExtractionResult(False, str(e), 0, usage_error=is_usage_error(e))

        logger.info("Extracted %d frames from %s", dump.n_frames, input_path)
        return FeatureExtractionResult(True, f"Wrote {output_path} ({dump.n_frames} frames).", dump.n_frames)
