"""End-to-end training loop: decoder (and encoder) -> synthesizer -> spectral loss."""

from __future__ import annotations

import logging
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from vocal_timbre_fx.autodiff import Tape, backward, gradients_by_name, watch_all
from vocal_timbre_fx.config import PipelineConfig
from vocal_timbre_fx.errors import ConfigurationError, GradientError
from vocal_timbre_fx.nn.architecture import Architecture, NormalizationStats
from vocal_timbre_fx.nn.checkpoint import ModelCheckpoint, checkpoint_path, save_checkpoint
from vocal_timbre_fx.nn.decoder import decoder_forward, init_decoder_params
from vocal_timbre_fx.nn.encoder import encoder_forward, init_encoder_params
from vocal_timbre_fx.synth.render import render_signal
from vocal_timbre_fx.training.datasets import DatasetSampler, TrainingWindow
from vocal_timbre_fx.training.loss import multiscale_spectral_loss
from vocal_timbre_fx.training.optim import AdamHyperParams, AdamState, adam_step
from vocal_timbre_fx.worker import TapeWorkerPool

logger = logging.getLogger(__name__)

METRICS_FILENAME = "metrics.tsv"
MODEL_KINDS = ("timbre", "latent")


def init_params(arch: Architecture, seed: int) -> Dict[str, np.ndarray]:
    params = init_decoder_params(arch, seed)
    if arch.has_latent:
        params.update(init_encoder_params(arch, seed))
    return params


def window_loss_and_grads(
    params: Dict[str, np.ndarray],
    arch: Architecture,
    stats: NormalizationStats,
    window: TrainingWindow,
    cfg: PipelineConfig,
    noise_seed: int,
) -> Tuple[float, Dict[str, np.ndarray]]:
    """Forward and backward pass for one window on its own tape."""
    with Tape() as tape:
        watched = watch_all(tape, params)
        z = encoder_forward(watched, arch, window.mfcc) if arch.has_latent else None
        controls = decoder_forward(watched, arch, stats, window.f0, window.loudness, cfg.frame_rate, z)
        audio = render_signal(window.f0, controls, cfg.sample_rate, noise_seed)
        loss = multiscale_spectral_loss(audio, window.audio, cfg.loss)
    grads = backward(tape, loss)
    return loss.item(), gradients_by_name(grads, watched)


def train(
    sampler: DatasetSampler,
    model_kind: str,
    cfg: PipelineConfig,
    out_dir: Optional[Path] = None,
) -> List[ModelCheckpoint]:
    """Train a model and return the checkpoints emitted along the way.

    Parameters
    ----------
    sampler:
        Where windows come from (one dataset or a vocal/instrument mix).
    model_kind:
        "timbre" (pitch and loudness only) or "latent" (adds the MFCC encoder).
    cfg:
        Pipeline settings; `cfg.train` and `cfg.loss` drive the loop.
    out_dir:
        If given, `ckpt_<step>.bin` files and a `step<TAB>loss` metrics log are
        written there.

    Returns
    -------
    list of ModelCheckpoint
        One per `checkpoint_every` steps plus the final step, in step order.

    Raises
    ------
    ConfigurationError
        Unknown model kind, rate mismatch, or MFCC width not matching the model.
    DatasetError
        Window longer than the shortest clip.
    GradientError
        If the loss becomes non-finite.
    """
    if model_kind not in MODEL_KINDS:
        raise ConfigurationError(f"Unknown model kind {model_kind!r}; expected one of {MODEL_KINDS}.")
    if sampler.sample_rate != cfg.sample_rate:
        raise ConfigurationError(f"Dataset is at {sampler.sample_rate} Hz but the model runs at {cfg.sample_rate} Hz.")
    tcfg = cfg.train
    arch = Architecture.from_config(cfg, latent=model_kind == "latent")
    if arch.has_latent:
        widths = {ex.features.mfcc.coefficients.shape[1] for ex in sampler.examples}
        if widths != {arch.n_mfcc}:
            raise ConfigurationError(f"Latent model needs {arch.n_mfcc} MFCCs per frame; dataset has {sorted(widths)}.")
    sampler.check_window(tcfg.clip_length // cfg.hop)

    stats = sampler.normalization_stats()
    params = init_params(arch, tcfg.seed)
    state = AdamState.zeros(params)
    hyper = AdamHyperParams.from_config(tcfg)
    rng = np.random.default_rng(tcfg.seed)

    metrics = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        metrics = open(out_dir / METRICS_FILENAME, "w", encoding="utf-8")

    logger.info(
        "Training %s model: %d steps, batch %d, %d clips, seed %d",
        model_kind, tcfg.total_steps, tcfg.batch_size, len(sampler.examples), tcfg.seed,
    )
    checkpoints: List[ModelCheckpoint] = []
    try:
        with TapeWorkerPool(tcfg.workers) as pool:
            for step in range(1, tcfg.total_steps + 1):
                windows = [sampler.draw(rng, tcfg.clip_length, cfg.hop) for _ in range(tcfg.batch_size)]
                seeds = [int(rng.integers(2**31)) for _ in windows]
                tasks = [
                    partial(window_loss_and_grads, params, arch, stats, window, cfg, seed)
                    for window, seed in zip(windows, seeds)
                ]
                results = pool.map(tasks)

                loss = float(np.mean([r[0] for r in results]))
                if not np.isfinite(loss):
                    raise GradientError(f"Loss became non-finite at step {step}.")
                grads = {name: sum(r[1][name] for r in results) / len(results) for name in params}
                params, state = adam_step(params, grads, state, hyper)

                logger.debug("step %d loss %.6f", step, loss)
                if metrics is not None:
                    metrics.write(f"{step}\t{loss:.9g}\n")
                    metrics.flush()

                if step % tcfg.checkpoint_every == 0 or step == tcfg.total_steps:
                    ckpt = ModelCheckpoint(
                        architecture=arch,
                        params=dict(params),
                        stats=stats,
                        step=step,
                        sample_rate=cfg.sample_rate,
                        frame_rate=cfg.frame_rate,
                        seed=tcfg.seed,
                    )
                    checkpoints.append(ckpt)
                    if out_dir is not None:
                        save_checkpoint(ckpt, checkpoint_path(out_dir, step))
                    logger.info("Checkpoint at step %d (loss %.4f)", step, loss)
    finally:
        if metrics is not None:
            metrics.close()
    return checkpoints


def read_metrics_log(path: Path) -> List[Tuple[int, float]]:
    """Parse a `step<TAB>loss` log."""
    entries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        step, loss = line.split("\t")
        entries.append((int(step), float(loss)))
    return entries


def smoothed_losses(entries: Sequence[Tuple[int, float]], window: int = 100) -> Dict[int, float]:
    """Trailing moving average of the loss, keyed by step."""
    if window < 1:
        raise ValueError("window must be >= 1.")
    losses = np.array([loss for _, loss in entries], dtype=np.float64)
    sums = np.concatenate([[0.0], np.cumsum(losses)])
    smoothed = {}
    for i, (step, _) in enumerate(entries):
        lo = max(0, i + 1 - window)
        smoothed[step] = float((sums[i + 1] - sums[lo]) / (i + 1 - lo))
    return smoothed
