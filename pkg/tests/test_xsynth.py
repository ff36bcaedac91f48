import numpy as np
import pytest

from vocal_timbre_fx.audio import read_wav, write_wav
from vocal_timbre_fx.config import PipelineConfig
from vocal_timbre_fx.errors import ConfigurationError, DomainError, ShapeError
from vocal_timbre_fx.inference import resynthesize
from vocal_timbre_fx.models import AudioClip, InterpolationFactor
from vocal_timbre_fx.nn import Architecture, ModelCheckpoint, NormalizationStats, save_checkpoint
from vocal_timbre_fx.services.cross_synthesis import (
    CrossSynthesisService,
    cross_synthesize,
    sweep_output_path,
)
from vocal_timbre_fx.synth import interpolate_harmonics, nyquist_mask
from vocal_timbre_fx.training.trainer import init_params

from conftest import SR, harmonic_tone


def random_rows(rng, n_frames, k):
    return rng.dirichlet(np.ones(k), size=n_frames)


def rms_dbfs(samples):
    return 20.0 * np.log10(np.sqrt(np.mean(samples**2)) + 1e-12)


def make_checkpoint(latent_size=0):
    arch = Architecture(n_harmonics=8, noise_bins=17, hidden_size=8, encoder_hidden_size=8, latent_size=latent_size, n_mfcc=13)
    return ModelCheckpoint(arch, init_params(arch, 0), NormalizationStats(), step=0, sample_rate=SR, frame_rate=250)


def test_endpoints_return_one_side_exactly():
    rng = np.random.default_rng(0)
    predicted, measured = random_rows(rng, 10, 8), random_rows(rng, 10, 8)
    f0 = np.full(10, 200.0)
    np.testing.assert_array_equal(interpolate_harmonics(predicted, measured, 0.0, f0, SR), predicted)
    np.testing.assert_array_equal(interpolate_harmonics(predicted, measured, 1.0, f0, SR), measured)


def test_midpoint_of_two_one_hots():
    predicted = np.array([[1.0, 0.0]])
    measured = np.array([[0.0, 1.0]])
    blended = interpolate_harmonics(predicted, measured, InterpolationFactor(0.5), np.array([100.0]), SR)
    np.testing.assert_allclose(blended, [[0.5, 0.5]])


def test_harmonics_above_nyquist_are_zeroed():
    ones = np.full((1, 10), 0.1)
    blended = interpolate_harmonics(ones, ones, 0.3, np.array([900.0]), SR)
    assert np.all(blended[0, :8] > 0)
    np.testing.assert_array_equal(blended[0, 8:], 0.0)
    np.testing.assert_array_equal(nyquist_mask(np.array([900.0]), 10, SR)[0], np.arange(1, 11) * 900 < 8000)


def test_blend_stays_on_the_simplex_below_nyquist():
    rng = np.random.default_rng(1)
    predicted, measured = random_rows(rng, 1000, 8), random_rows(rng, 1000, 8)
    f0 = rng.uniform(50.0, 900.0, 1000)
    for p in (0.1, 0.37, 0.7, 0.95):
        blended = interpolate_harmonics(predicted, measured, p, f0, SR)
        assert np.all(blended >= 0)
        np.testing.assert_allclose(blended.sum(axis=1), 1.0, atol=1e-12)


def test_blend_lies_between_its_inputs_entry_by_entry():
    rng = np.random.default_rng(5)
    predicted, measured = random_rows(rng, 1000, 12), random_rows(rng, 1000, 12)
    f0 = rng.uniform(50.0, 2500.0, 1000)
    below = nyquist_mask(f0, 12, SR)
    assert not below.all()
    low, high = np.minimum(predicted, measured), np.maximum(predicted, measured)
    for p in rng.uniform(0.0, 1.0, 20):
        blended = interpolate_harmonics(predicted, measured, p, f0, SR)
        assert np.all(blended[below] >= low[below] - 1e-15)
        assert np.all(blended[below] <= high[below] + 1e-15)
        np.testing.assert_array_equal(blended[~below], 0.0)


def test_blend_is_continuous_in_p():
    rng = np.random.default_rng(2)
    predicted, measured = random_rows(rng, 50, 8), random_rows(rng, 50, 8)
    f0 = np.full(50, 150.0)
    a = interpolate_harmonics(predicted, measured, 0.5, f0, SR)
    b = interpolate_harmonics(predicted, measured, 0.5 + 1e-6, f0, SR)
    assert np.max(np.abs(a - b)) <= 2e-6


def test_invalid_blend_inputs():
    rows = np.full((3, 4), 0.25)
    f0 = np.full(3, 100.0)
    with pytest.raises(ConfigurationError):
        interpolate_harmonics(rows, rows, 1.5, f0, SR)
    with pytest.raises(ConfigurationError):
        interpolate_harmonics(rows, rows, -0.1, f0, SR)
    with pytest.raises(ShapeError):
        interpolate_harmonics(rows, rows[:, :3], 0.5, f0, SR)
    with pytest.raises(ShapeError):
        interpolate_harmonics(rows, rows, 0.5, f0[:2], SR)
    with pytest.raises(DomainError):
        interpolate_harmonics(rows, -rows, 0.5, f0, SR)


def test_cross_synthesis_at_zero_equals_resynthesis():
    ckpt = make_checkpoint()
    clip = harmonic_tone(220.0, [0.3, 0.1, 0.05], seconds=0.5)
    cfg = PipelineConfig()
    crossed = cross_synthesize(clip, ckpt, 0.0, seed=4, cfg=cfg)
    plain = resynthesize(clip, ckpt, seed=4, cfg=cfg)
    np.testing.assert_array_equal(crossed.samples, plain.samples)


def test_silence_in_gives_near_silence_out():
    silence = AudioClip(np.zeros(SR // 2), SR)
    out = cross_synthesize(silence, make_checkpoint(), 0.7, seed=1)
    assert len(out) == len(silence)
    assert rms_dbfs(out.samples) < -50.0


def test_cross_synthesis_rejects_latent_checkpoints():
    clip = harmonic_tone(220.0, [0.3], seconds=0.5)
    with pytest.raises(ConfigurationError):
        cross_synthesize(clip, make_checkpoint(latent_size=4), 0.5)


def test_sweep_output_names():
    assert sweep_output_path("out/voice.wav", 0.25).name == "voice_p0.25.wav"
    assert sweep_output_path("out/voice.wav", 1.0).name == "voice_p1.wav"


def test_sweep_writes_one_file_per_value(tmp_path):
    write_wav(harmonic_tone(247.0, [0.3, 0.1], seconds=0.5), tmp_path / "in.wav")
    save_checkpoint(make_checkpoint(), tmp_path / "ckpt_0.bin")
    service = CrossSynthesisService(PipelineConfig())
    result = service.sweep(tmp_path / "in.wav", tmp_path / "ckpt_0.bin", tmp_path / "x.wav", [0.0, 0.5, 1.0])
    assert result.success, result.message
    assert [path.name for path in result.outputs] == ["x_p0.wav", "x_p0.5.wav", "x_p1.wav"]
    for path in result.outputs:
        assert len(read_wav(path)) == 0.5 * SR


def test_missing_checkpoint_is_a_usage_error(tmp_path):
    write_wav(harmonic_tone(247.0, [0.3], seconds=0.5), tmp_path / "in.wav")
    result = CrossSynthesisService(PipelineConfig()).run(tmp_path / "in.wav", tmp_path / "nope.bin", tmp_path / "o.wav", 0.5)
    assert not result.success
    assert result.usage_error
