"""Pipeline configuration: one frozen dataclass per stage plus TOML persistence."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Tuple

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from vocal_timbre_fx.errors import ConfigurationError


@dataclass(frozen=True)
class PitchConfig:
    """YIN pitch tracker settings.

    Parameters
    ----------
    f0_min, f0_max:
        Search range in Hz; estimates outside it are reported unvoiced.
    frame_length:
        Analysis window in samples.
    threshold:
        Absolute threshold on the cumulative-mean-normalized difference.
    """

    f0_min: float = 50.0
    f0_max: float = 1000.0
    frame_length: int = 1024
    threshold: float = 0.15

    def __post_init__(self) -> None:
        if not 0 < self.f0_min < self.f0_max:
            raise ConfigurationError("pitch: require 0 < f0_min < f0_max.")
        if self.frame_length < 64:
            raise ConfigurationError("pitch: frame_length must be at least 64 samples.")
        if not 0 < self.threshold < 1:
            raise ConfigurationError("pitch: threshold must lie in (0, 1).")


@dataclass(frozen=True)
class LoudnessConfig:
    """A-weighted loudness settings."""

    n_fft: int = 1024
    floor_db: float = -80.0


@dataclass(frozen=True)
class MfccConfig:
    """MFCC analysis settings."""

    n_fft: int = 1024
    n_mels: int = 128
    n_mfcc: int = 30
    log_floor: float = 1e-6

    def __post_init__(self) -> None:
        if not 1 <= self.n_mfcc <= self.n_mels:
            raise ConfigurationError("mfcc: require 1 <= n_mfcc <= n_mels.")


@dataclass(frozen=True)
class HarmonicConfig:
    """Input harmonic measurement settings."""

    n_fft: int = 2048


@dataclass(frozen=True)
class SynthConfig:
    """Synthesizer sizes: K harmonics and B noise magnitude bins."""

    n_harmonics: int = 64
    noise_bins: int = 65

    def __post_init__(self) -> None:
        if self.n_harmonics < 1:
            raise ConfigurationError("synth: n_harmonics must be >= 1.")
        if self.noise_bins < 2:
            raise ConfigurationError("synth: noise_bins must be >= 2.")


@dataclass(frozen=True)
class ModelConfig:
    """Network widths. `latent_size` 0 selects the z-less timbre-transfer decoder."""

    hidden_size: int = 128
    encoder_hidden_size: int = 128
    latent_size: int = 16


@dataclass(frozen=True)
class LossConfig:
    """Multi-scale spectral loss settings."""

    fft_sizes: Tuple[int, ...] = (2048, 1024, 512, 256, 128, 64)
    overlap: float = 0.75
    log_weight: float = 1.0
    eps: float = 1e-7

    def __post_init__(self) -> None:
        object.__setattr__(self, "fft_sizes", tuple(int(n) for n in self.fft_sizes))
        if not self.fft_sizes:
            raise ConfigurationError("loss: fft_sizes must not be empty.")
        for n in self.fft_sizes:
            if n < 64 or n & (n - 1):
                raise ConfigurationError(f"loss: fft size {n} is not a power of two >= 64.")
        if not 0 <= self.overlap < 1:
            raise ConfigurationError("loss: overlap must lie in [0, 1).")


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and schedule settings.

    Parameters
    ----------
    clip_length:
        Training window length in samples.
    checkpoint_every:
        Emit a checkpoint every this many steps (and at the final step).
    workers:
        Threads evaluating batch elements; 1 runs them inline.
    """

    batch_size: int = 4
    clip_length: int = 16000
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    total_steps: int = 10000
    checkpoint_every: int = 500
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        for name in ("batch_size", "clip_length", "total_steps", "checkpoint_every", "workers"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"train: {name} must be positive.")
        if self.learning_rate <= 0 or self.adam_eps <= 0:
            raise ConfigurationError("train: learning_rate and adam_eps must be positive.")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ConfigurationError("train: Adam betas must lie in (0, 1).")
        if self.checkpoint_every > self.total_steps:
            raise ConfigurationError("train: checkpoint_every must not exceed total_steps.")
        if self.seed < 0:
            raise ConfigurationError("train: seed must be non-negative.")


@dataclass(frozen=True)
class CrossSynthesisConfig:
    """Vocoding effect defaults."""

    p: float = 0.7

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ConfigurationError("xsynth: p must lie in [0, 1].")


@dataclass(frozen=True)
class PipelineConfig:
    """Every numeric default of the pipeline in one place."""

    sample_rate: int = 16000
    frame_rate: int = 250
    seed: int = 0
    pitch: PitchConfig = field(default_factory=PitchConfig)
    loudness: LoudnessConfig = field(default_factory=LoudnessConfig)
    mfcc: MfccConfig = field(default_factory=MfccConfig)
    harmonics: HarmonicConfig = field(default_factory=HarmonicConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    xsynth: CrossSynthesisConfig = field(default_factory=CrossSynthesisConfig)

    def __post_init__(self) -> None:
        if self.sample_rate <= 0 or self.frame_rate <= 0:
            raise ConfigurationError("sample_rate and frame_rate must be positive.")
        if self.sample_rate % self.frame_rate:
            raise ConfigurationError(
                f"hop = sample_rate / frame_rate must be integral ({self.sample_rate}/{self.frame_rate})."
            )
        if self.train.clip_length % self.hop:
            raise ConfigurationError("train: clip_length must be a multiple of the hop size.")

    @property
    def hop(self) -> int:
        """Samples per frame."""
        return self.sample_rate // self.frame_rate


DEFAULT_CONFIG = PipelineConfig()

_SECTIONS: Dict[str, type] = {
    "pitch": PitchConfig,
    "loudness": LoudnessConfig,
    "mfcc": MfccConfig,
    "harmonics": HarmonicConfig,
    "synth": SynthConfig,
    "model": ModelConfig,
    "loss": LossConfig,
    "train": TrainConfig,
    "xsynth": CrossSynthesisConfig,
}


def config_to_dict(cfg: PipelineConfig) -> Dict[str, Any]:
    """Plain nested dict of `cfg` (tuples become lists)."""
    raw = dataclasses.asdict(cfg)
    raw["loss"]["fft_sizes"] = list(cfg.loss.fft_sizes)
    return raw


def config_from_dict(raw: Mapping[str, Any]) -> PipelineConfig:
    """Build a config from a nested mapping; missing keys keep their defaults."""
    top_fields = {f.name for f in dataclasses.fields(PipelineConfig)}
    kwargs: Dict[str, Any] = {}
    for key, value in raw.items():
        if key not in top_fields:
            raise ConfigurationError(f"Unknown configuration key {key!r}.")
        section = _SECTIONS.get(key)
        if section is None:
            kwargs[key] = value
            continue
        if not isinstance(value, Mapping):
            raise ConfigurationError(f"Configuration section [{key}] must be a table.")
        kwargs[key] = _build_section(key, section, value)
    return PipelineConfig(**kwargs)


def _build_section(name: str, section: type, values: Mapping[str, Any]) -> Any:
    known = {f.name for f in dataclasses.fields(section)}
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(f"Unknown key(s) in [{name}]: {', '.join(sorted(unknown))}.")
    try:
        return section(**values)
    except TypeError as e:
        raise ConfigurationError(f"Invalid [{name}] section: {e}") from e


def load_config(path: Path) -> PipelineConfig:
    """Read a TOML config file.

    Raises
    ------
    ConfigurationError
        If the file is missing, is not valid TOML, or holds unknown keys.
    """
    try:
        with open(path, "rb") as f:
            raw = tomllib.load(f)
    except FileNotFoundError as e:
        raise ConfigurationError(f"Config file not found: {path}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"Config file {path} is not valid TOML: {e}") from e
    return config_from_dict(raw)


def dump_config(cfg: PipelineConfig, path: Path) -> None:
    """Write the effective config as TOML; `load_config` reproduces it exactly."""
    with open(path, "wb") as f:
        tomli_w.dump(config_to_dict(cfg), f)


def config_hash(cfg: PipelineConfig) -> str:
    """SHA-256 over the canonical JSON form of `cfg`."""
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def with_overrides(cfg: PipelineConfig, section: str | None = None, **values: Any) -> PipelineConfig:
    """Return `cfg` with top-level (`section=None`) or per-section values replaced.

    `None` values are ignored so argparse defaults can be passed straight through.
    """
    values = {k: v for k, v in values.items() if v is not None}
    if not values:
        return cfg
    raw = config_to_dict(cfg)
    target = raw if section is None else raw[section]
    target.update(values)
    return config_from_dict(raw)
