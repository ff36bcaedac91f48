"""Spectral loss, optimizer, datasets and the training loop."""

from vocal_timbre_fx.training.datasets import (
    DatasetSampler,
    TrainingExample,
    TrainingWindow,
    load_dataset_dir,
    load_example,
    mix_datasets,
    single_dataset,
)
from vocal_timbre_fx.training.loss import multiscale_spectral_loss
from vocal_timbre_fx.training.optim import AdamHyperParams, AdamState, adam_step
from vocal_timbre_fx.training.performance import render_random_performance
from vocal_timbre_fx.training.trainer import read_metrics_log, smoothed_losses, train

__all__ = [
    "DatasetSampler",
    "TrainingExample",
    "TrainingWindow",
    "load_dataset_dir",
    "load_example",
    "mix_datasets",
    "single_dataset",
    "multiscale_spectral_loss",
    "AdamHyperParams",
    "AdamState",
    "adam_step",
    "render_random_performance",
    "read_metrics_log",
    "smoothed_losses",
    "train",
]
