"""Architecture descriptor and conditioning statistics shared by the networks."""

from __future__ import annotations

from dataclasses import dataclass

from vocal_timbre_fx.config import PipelineConfig
from vocal_timbre_fx.errors import ConfigurationError


@dataclass(frozen=True)
class Architecture:
    """Sizes fixing every parameter shape.

    Parameters
    ----------
    n_harmonics:
        K, width of the harmonic distribution head.
    noise_bins:
        B, noise filter magnitude samples from 0 Hz to Nyquist.
    hidden_size:
        Width of the decoder dense stacks and GRU.
    encoder_hidden_size:
        Width of the encoder GRU (unused without a latent).
    latent_size:
        Width of z; 0 selects the timbre-transfer decoder with no encoder.
    n_mfcc:
        Encoder input width.
    """

    n_harmonics: int = 64
    noise_bins: int = 65
    hidden_size: int = 128
    encoder_hidden_size: int = 128
    latent_size: int = 0
    n_mfcc: int = 30

    def __post_init__(self) -> None:
        if self.n_harmonics < 1 or self.noise_bins < 2 or self.hidden_size < 1:
            raise ConfigurationError(f"Invalid architecture: {self}.")
        if self.latent_size < 0:
            raise ConfigurationError("latent_size must be >= 0.")
        if self.has_latent and (self.encoder_hidden_size < 1 or self.n_mfcc < 1):
            raise ConfigurationError("A latent architecture needs encoder_hidden_size and n_mfcc >= 1.")

    @property
    def has_latent(self) -> bool:
        return self.latent_size > 0

    @property
    def kind(self) -> str:
        return "latent" if self.has_latent else "timbre"

    @classmethod
    def from_config(cls, cfg: PipelineConfig, latent: bool) -> "Architecture":
        return cls(
            n_harmonics=cfg.synth.n_harmonics,
            noise_bins=cfg.synth.noise_bins,
            hidden_size=cfg.model.hidden_size,
            encoder_hidden_size=cfg.model.encoder_hidden_size,
            latent_size=cfg.model.latent_size if latent else 0,
            n_mfcc=cfg.mfcc.n_mfcc,
        )


@dataclass(frozen=True)
class NormalizationStats:
    """Decoder input conditioning: loudness standardization and the MIDI pitch scale."""

    loudness_mean: float = -40.0
    loudness_std: float = 20.0
    f0_scale: float = 127.0

    def __post_init__(self) -> None:
        if self.loudness_std <= 0 or self.f0_scale <= 0:
            raise ConfigurationError("loudness_std and f0_scale must be positive.")
