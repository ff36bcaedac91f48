"""Model checkpoints (`ckpt_<step>.bin`)."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from vocal_timbre_fx.container import Container, decode_container, encode_container
from vocal_timbre_fx.errors import (
    ArchitectureMismatchError,
    CheckpointVersionError,
    CorruptCheckpointError,
)
from vocal_timbre_fx.nn.architecture import Architecture, NormalizationStats
from vocal_timbre_fx.nn.decoder import decoder_param_shapes
from vocal_timbre_fx.nn.encoder import encoder_param_shapes

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"VTFXCKPT"
CHECKPOINT_VERSION = 1
CHECKPOINT_PATTERN = re.compile(r"^ckpt_(\d+)\.bin$")

_ARCH_FIELDS = ("n_harmonics", "noise_bins", "hidden_size", "encoder_hidden_size", "latent_size", "n_mfcc")


@dataclass(frozen=True, eq=False)
class ModelCheckpoint:
    """A trained (or freshly initialized) model and everything needed to run it.

    Parameters
    ----------
    architecture:
        Sizes fixing every tensor shape.
    params:
        Decoder and (for latent models) encoder tensors by dotted name.
    stats:
        Input conditioning statistics gathered from the training data.
    step:
        Optimizer steps taken when the checkpoint was written.
    sample_rate, frame_rate:
        Rates the model runs at.
    seed:
        Seed used for initialization and training.
    """

    architecture: Architecture
    params: Dict[str, np.ndarray] = field(repr=False)
    stats: NormalizationStats
    step: int
    sample_rate: int
    frame_rate: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.step < 0:
            raise ValueError(f"step must be >= 0, got {self.step}.")
        check_param_shapes(self.architecture, self.params)
        # Tensors hold exactly the float32 values a checkpoint file stores.
        object.__setattr__(self, "params", {name: storage_precision(value) for name, value in self.params.items()})

    @property
    def hop(self) -> int:
        return self.sample_rate // self.frame_rate


def storage_precision(value: np.ndarray) -> np.ndarray:
    """`value` rounded to the float32 it is stored as, held as float64."""
    return np.asarray(value, dtype="<f4").astype(np.float64)


def expected_param_shapes(arch: Architecture) -> Dict[str, Tuple[int, ...]]:
    shapes = decoder_param_shapes(arch)
    if arch.has_latent:
        shapes.update(encoder_param_shapes(arch))
    return shapes


def check_param_shapes(arch: Architecture, params: Dict[str, np.ndarray]) -> None:
    """Raise ArchitectureMismatchError unless `params` has exactly the shapes `arch` implies."""
    expected = expected_param_shapes(arch)
    missing = sorted(set(expected) - set(params))
    extra = sorted(set(params) - set(expected))
    if missing or extra:
        raise ArchitectureMismatchError(f"Parameter names do not match the architecture (missing {missing}, unexpected {extra}).")
    for name, shape in expected.items():
        if tuple(np.shape(params[name])) != shape:
            raise ArchitectureMismatchError(f"{name}: expected shape {shape}, got {tuple(np.shape(params[name]))}.")


def encode_checkpoint(ckpt: ModelCheckpoint) -> bytes:
    arch = ckpt.architecture
    ints = {name: getattr(arch, name) for name in _ARCH_FIELDS}
    ints.update(sample_rate=ckpt.sample_rate, frame_rate=ckpt.frame_rate, seed=ckpt.seed, step=ckpt.step)
    floats = {
        "loudness_mean": ckpt.stats.loudness_mean,
        "loudness_std": ckpt.stats.loudness_std,
        "f0_scale": ckpt.stats.f0_scale,
    }
    arrays = {name: ckpt.params[name] for name in sorted(ckpt.params)}
    return encode_container(Container(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, ints, floats, arrays))


def save_checkpoint(ckpt: ModelCheckpoint, path: Path) -> None:
    """Write `ckpt`; tensors are stored as little-endian float32."""
    Path(path).write_bytes(encode_checkpoint(ckpt))
    logger.debug("Saved checkpoint %s (step %d)", path, ckpt.step)


def load_checkpoint(path: Path) -> ModelCheckpoint:
    """Read a checkpoint written by `save_checkpoint`.

    Raises
    ------
    FileNotFoundError
        If `path` does not exist.
    CorruptCheckpointError
        On a bad magic tag, truncation, trailing bytes or missing fields.
    CheckpointVersionError
        On an unknown format version.
    ArchitectureMismatchError
        When tensor names or shapes disagree with the stored architecture.
    """
    payload = Path(path).read_bytes()
    container = decode_container(
        payload, CHECKPOINT_MAGIC, (CHECKPOINT_VERSION,), CorruptCheckpointError, CheckpointVersionError
    )
    ints, floats = container.ints, container.floats
    required_ints = set(_ARCH_FIELDS) | {"sample_rate", "frame_rate", "seed", "step"}
    required_floats = {"loudness_mean", "loudness_std", "f0_scale"}
    if not required_ints <= set(ints) or not required_floats <= set(floats):
        raise CorruptCheckpointError(f"{path}: checkpoint header is incomplete.")
    if ints["step"] < 0:
        raise CorruptCheckpointError(f"{path}: negative step {ints['step']}.")
    try:
        arch = Architecture(**{name: int(ints[name]) for name in _ARCH_FIELDS})
        stats = NormalizationStats(**{name: float(floats[name]) for name in sorted(required_floats)})
    except ValueError as e:
        raise CorruptCheckpointError(f"{path}: {e}") from e
    return ModelCheckpoint(
        architecture=arch,
        params=dict(container.arrays),
        stats=stats,
        step=int(ints["step"]),
        sample_rate=int(ints["sample_rate"]),
        frame_rate=int(ints["frame_rate"]),
        seed=int(ints["seed"]),
    )


def checkpoint_path(run_dir: Path, step: int) -> Path:
    return Path(run_dir) / f"ckpt_{step}.bin"


def list_checkpoints(run_dir: Path) -> List[Tuple[int, Path]]:
    """(step, path) for every `ckpt_<step>.bin` in `run_dir`, sorted by step."""
    found = []
    for path in Path(run_dir).iterdir():
        match = CHECKPOINT_PATTERN.match(path.name)
        if match:
            found.append((int(match.group(1)), path))
    return sorted(found)
