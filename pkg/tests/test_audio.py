import numpy as np
import pytest
import soundfile as sf

from conftest import SR, dft_peak_hz, tone
from vocal_timbre_fx.audio import read_wav, resample, write_wav
from vocal_timbre_fx.errors import (
    AudioFileNotFoundError,
    MalformedWavError,
    UnsupportedEncodingError,
)
from vocal_timbre_fx.models import AudioClip


def test_wav_round_trip_within_one_quantization_step(tmp_path):
    clip = tone(440.0, seconds=0.25, amplitude=0.8)
    path = tmp_path / "tone.wav"
    write_wav(clip, path)
    loaded = read_wav(path)
    assert loaded.sample_rate == SR
    assert len(loaded) == len(clip)
    assert np.max(np.abs(loaded.samples - clip.samples)) <= 1.0 / 32768 + 1e-12


def test_empty_clip_round_trips(tmp_path):
    path = tmp_path / "empty.wav"
    write_wav(AudioClip(np.zeros(0), SR), path)
    loaded = read_wav(path)
    assert loaded.sample_rate == SR
    assert len(loaded) == 0


def test_white_noise_round_trip_error_is_below_one_step_rms(tmp_path):
    noise = AudioClip(np.random.default_rng(7).uniform(-0.9, 0.9, SR), SR)
    path = tmp_path / "noise.wav"
    write_wav(noise, path)
    error = read_wav(path).samples - noise.samples
    assert np.sqrt(np.mean(error**2)) <= 1.0 / 32768


def test_write_clips_out_of_range_samples(tmp_path):
    path = tmp_path / "loud.wav"
    write_wav(AudioClip(np.array([2.0, -2.0, 0.0]), SR), path)
    loaded = read_wav(path)
    assert loaded.samples[0] == pytest.approx(32767 / 32768)
    assert loaded.samples[1] == -1.0


def test_float_wav_is_read(tmp_path):
    path = tmp_path / "float.wav"
    data = np.linspace(-0.5, 0.5, 100)
    sf.write(path, data, SR, subtype="FLOAT")
    np.testing.assert_allclose(read_wav(path).samples, data, atol=1e-7)


def test_stereo_is_averaged_to_mono(tmp_path):
    path = tmp_path / "stereo.wav"
    sf.write(path, np.stack([np.full(64, 0.5), np.zeros(64)], axis=1), SR, subtype="PCM_16")
    np.testing.assert_allclose(read_wav(path).samples, 0.25, atol=1e-4)


def test_missing_file_names_the_path(tmp_path):
    path = tmp_path / "nope.wav"
    with pytest.raises(AudioFileNotFoundError, match="nope.wav"):
        read_wav(path)


def test_garbage_file_is_malformed(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(b"definitely not a wav file")
    with pytest.raises(MalformedWavError):
        read_wav(path)


def test_24_bit_pcm_is_unsupported(tmp_path):
    path = tmp_path / "deep.wav"
    sf.write(path, np.zeros(32), SR, subtype="PCM_24")
    with pytest.raises(UnsupportedEncodingError):
        read_wav(path)


def test_resample_same_rate_is_identity():
    clip = tone(300.0, seconds=0.1)
    assert resample(clip, SR) is clip


def test_resample_length_and_pitch():
    clip = tone(1000.0, seconds=1.0, sr=44100)
    out = resample(clip, SR)
    assert out.sample_rate == SR
    assert len(out) == round(len(clip) * SR / 44100)
    assert dft_peak_hz(out.samples) == pytest.approx(1000.0, abs=2.0)


def test_48_khz_file_is_read_and_resampled_to_the_model_rate(tmp_path):
    path = tmp_path / "studio.wav"
    write_wav(tone(440.0, seconds=4.0, sr=48000), path)
    clip = read_wav(path)
    assert clip.sample_rate == 48000
    assert len(clip) == 4 * 48000
    out = resample(clip, SR)
    assert len(out) == round(len(clip) * SR / 48000) == 64000
    assert dft_peak_hz(out.samples) == pytest.approx(440.0, abs=1.0)


def test_downsampling_removes_content_above_new_nyquist():
    clip = tone(10000.0, seconds=0.5, sr=44100)
    out = resample(clip, SR)
    assert out.rms() < 1e-3 * clip.rms()
