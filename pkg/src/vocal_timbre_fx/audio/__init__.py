"""Audio file I/O and sample-rate conversion."""

from vocal_timbre_fx.audio.wav import read_wav, resample, write_wav

__all__ = ["read_wav", "write_wav", "resample"]
