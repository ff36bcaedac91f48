"""`train` workflow: dataset directories -> checkpoints + metrics log."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from vocal_timbre_fx.config import PipelineConfig, dump_config
from vocal_timbre_fx.errors import ConfigurationError, VocalFxError
from vocal_timbre_fx.models import TrainingResult
from vocal_timbre_fx.nn.checkpoint import checkpoint_path
from vocal_timbre_fx.services import is_usage_error
from vocal_timbre_fx.training import load_dataset_dir, mix_datasets, read_metrics_log, single_dataset, train
from vocal_timbre_fx.training.trainer import METRICS_FILENAME

logger = logging.getLogger(__name__)

EFFECTIVE_CONFIG_FILENAME = "config.toml"


@dataclass(frozen=True)
class MixSpec:
    """`vocal_dir:instrument_dir:ratio` from the command line."""

    vocal_dir: Path
    instrument_dir: Path
    ratio: float

    @classmethod
    def parse(cls, text: str) -> "MixSpec":
        parts = text.rsplit(":", 2)
        if len(parts) != 3:
            raise ConfigurationError(f"Expected VOCAL_DIR:INSTRUMENT_DIR:RATIO, got {text!r}.")
        try:
            ratio = float(parts[2])
        except ValueError as e:
            raise ConfigurationError(f"Mix ratio {parts[2]!r} is not a number.") from e
        return cls(Path(parts[0]), Path(parts[1]), ratio)


class TrainingService:
    def __init__(self, cfg: PipelineConfig) -> None:
        self._cfg = cfg

    def train(
        self,
        out_dir: Path,
        kind: str,
        data_dir: Optional[Path] = None,
        mix: Optional[MixSpec] = None,
    ) -> TrainingResult:
        """Train on `data_dir`, or on a vocal/instrument `mix`, writing into `out_dir`.

        Returns
        -------
        TrainingResult
            Checkpoint paths and the final step's loss.
        """
        try:
            if (data_dir is None) == (mix is None):
                raise ConfigurationError("Give either a data directory or --mix, not both.")
            if mix is not None:
                if not 0.0 < mix.ratio < 1.0:
                    raise ConfigurationError(f"Mix ratio must lie strictly between 0 and 1, got {mix.ratio}.")
                sampler = mix_datasets(
                    load_dataset_dir(mix.vocal_dir, self._cfg),
                    load_dataset_dir(mix.instrument_dir, self._cfg),
                    mix.ratio,
                )
            else:
                sampler = single_dataset(load_dataset_dir(data_dir, self._cfg))

            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            dump_config(self._cfg, out_dir / EFFECTIVE_CONFIG_FILENAME)
            checkpoints = train(sampler, kind, self._cfg, out_dir)
        except (VocalFxError, OSError) as e:
            return TrainingResult(False, str(e), usage_error=is_usage_error(e))

        paths = tuple(checkpoint_path(out_dir, ckpt.step) for ckpt in checkpoints)
        final_loss = read_metrics_log(out_dir / METRICS_FILENAME)[-1][1]
        logger.info("Training finished: %d checkpoints in %s", len(paths), out_dir)
        return TrainingResult(True, f"Wrote {len(paths)} checkpoint(s) to {out_dir}.", paths, final_loss)
