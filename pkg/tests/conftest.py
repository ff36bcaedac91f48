from pathlib import Path
from typing import Sequence

import numpy as np
import pytest

from vocal_timbre_fx.audio import write_wav
from vocal_timbre_fx.config import (
    LossConfig,
    ModelConfig,
    MfccConfig,
    PipelineConfig,
    SynthConfig,
    TrainConfig,
)
from vocal_timbre_fx.models import AudioClip

SR = 16000


def tone(freq: float, seconds: float = 1.0, amplitude: float = 0.5, sr: int = SR) -> AudioClip:
    t = np.arange(int(seconds * sr)) / sr
    return AudioClip(amplitude * np.sin(2 * np.pi * freq * t), sr)


def harmonic_tone(f0: float, amplitudes: Sequence[float], seconds: float = 1.0, sr: int = SR) -> AudioClip:
    t = np.arange(int(seconds * sr)) / sr
    samples = sum(a * np.sin(2 * np.pi * (k + 1) * f0 * t) for k, a in enumerate(amplitudes))
    return AudioClip(samples, sr)


def chirp(f_start: float, f_stop: float, seconds: float = 1.0, amplitude: float = 0.5, sr: int = SR) -> AudioClip:
    t = np.arange(int(seconds * sr)) / sr
    rate = (f_stop - f_start) / seconds
    return AudioClip(amplitude * np.sin(2 * np.pi * (f_start * t + 0.5 * rate * t**2)), sr)


def dft_peak_hz(samples: np.ndarray, sr: int = SR) -> float:
    spectrum = np.abs(np.fft.rfft(samples * np.hanning(len(samples))))
    return float(np.argmax(spectrum) * sr / len(samples))


@pytest.fixture
def small_cfg() -> PipelineConfig:
    """Pipeline sized for quick tests: K=8, B=17, narrow networks, short windows."""
    return PipelineConfig(
        synth=SynthConfig(n_harmonics=8, noise_bins=17),
        model=ModelConfig(hidden_size=8, encoder_hidden_size=8, latent_size=4),
        mfcc=MfccConfig(n_mfcc=13),
        loss=LossConfig(fft_sizes=(512, 256, 128, 64)),
        train=TrainConfig(batch_size=2, clip_length=2048, total_steps=4, checkpoint_every=2, seed=3),
    )


@pytest.fixture
def wav_dir(tmp_path: Path) -> Path:
    """Folder of three short voiced clips at different pitches."""
    folder = tmp_path / "clips"
    folder.mkdir()
    for i, f0 in enumerate((196.0, 247.0, 330.0)):
        write_wav(harmonic_tone(f0, [0.3, 0.15, 0.08], seconds=0.5), folder / f"clip_{i}.wav")
    return folder
