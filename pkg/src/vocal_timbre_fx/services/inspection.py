"""`inspect` workflow: checkpoint metadata, or a run directory's checkpoint sequence."""

from __future__ import annotations

from pathlib import Path
from typing import List

from vocal_timbre_fx.errors import ConfigurationError, VocalFxError
from vocal_timbre_fx.models import InspectionResult
from vocal_timbre_fx.nn.checkpoint import ModelCheckpoint, list_checkpoints, load_checkpoint
from vocal_timbre_fx.services import is_usage_error
from vocal_timbre_fx.training import read_metrics_log, smoothed_losses
from vocal_timbre_fx.training.trainer import METRICS_FILENAME

SMOOTHING_WINDOW = 100


def describe_checkpoint(ckpt: ModelCheckpoint) -> List[str]:
    arch = ckpt.architecture
    n_values = sum(int(p.size) for p in ckpt.params.values())
    return [
        f"kind: {arch.kind}",
        f"step: {ckpt.step}",
        f"sample_rate: {ckpt.sample_rate}",
        f"frame_rate: {ckpt.frame_rate}",
        f"seed: {ckpt.seed}",
        f"n_harmonics: {arch.n_harmonics}",
        f"noise_bins: {arch.noise_bins}",
        f"hidden_size: {arch.hidden_size}",
        f"latent_size: {arch.latent_size if arch.has_latent else 'none'}",
        f"loudness_mean: {ckpt.stats.loudness_mean:.4f}",
        f"loudness_std: {ckpt.stats.loudness_std:.4f}",
        f"parameters: {n_values} in {len(ckpt.params)} tensors",
    ]


class InspectionService:
    def inspect(self, path: Path) -> InspectionResult:
        """Describe a checkpoint file, or list every checkpoint in a run directory.

        For a directory, each line is ``step<TAB>smoothed loss<TAB>file``; the
        smoothed loss is a trailing 100-step mean from the metrics log, or
        ``-`` when the log is absent.
        """
        path = Path(path)
        try:
            if path.is_dir():
                lines = self._describe_run(path)
            elif path.exists():
                lines = describe_checkpoint(load_checkpoint(path))
            else:
                raise FileNotFoundError(f"No such checkpoint or directory: {path}")
        except (VocalFxError, OSError, ValueError) as e:
            return InspectionResult(False, str(e), usage_error=is_usage_error(e))
        return InspectionResult(True, f"Inspected {path}.", tuple(lines))

    @staticmethod
    def _describe_run(run_dir: Path) -> List[str]:
        found = list_checkpoints(run_dir)
        if not found:
            raise ConfigurationError(f"No ckpt_<step>.bin files in {run_dir}.")
        metrics = run_dir / METRICS_FILENAME
        smoothed = smoothed_losses(read_metrics_log(metrics), SMOOTHING_WINDOW) if metrics.exists() else {}
        lines = ["step\tsmoothed_loss\tfile"]
        for step, ckpt_path in found:
            loss = smoothed.get(step)
            lines.append(f"{step}\t{'-' if loss is None else f'{loss:.6f}'}\t{ckpt_path.name}")
        return lines
