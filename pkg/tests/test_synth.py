import numpy as np
import pytest
from scipy.signal import welch

from vocal_timbre_fx.autodiff import Tape, ops, value_and_grad
from vocal_timbre_fx.config import LossConfig
from vocal_timbre_fx.errors import ConfigurationError, DomainError, ShapeError
from vocal_timbre_fx.models import SynthControls
from vocal_timbre_fx.nn import exp_sigmoid
from vocal_timbre_fx.synth import (
    frequency_sampling_basis,
    harmonic_signal,
    harmonic_synth,
    noise_signal,
    noise_synth,
    render,
    render_signal,
    upsample_controls,
)
from vocal_timbre_fx.training.loss import multiscale_spectral_loss

from conftest import SR

FRAME_RATE = 250
HOP = SR // FRAME_RATE


def constant_controls(n_frames, amplitude, harmonics, noise_bins=17, noise_level=0.0):
    harmonics = np.asarray(harmonics, dtype=np.float64)
    return SynthControls(
        amplitude=np.full(n_frames, amplitude),
        harmonics=np.tile(harmonics, (n_frames, 1)),
        noise_mags=np.full((n_frames, noise_bins), noise_level),
        frame_rate=FRAME_RATE,
    )


def one_hot(k, n=8):
    row = np.zeros(n)
    row[k] = 1.0
    return row


def test_single_harmonic_has_the_requested_level():
    clip = harmonic_synth(np.full(250, 440.0), constant_controls(250, 0.5, one_hot(0)), SR)
    assert len(clip) == SR
    rms = np.sqrt(np.mean(clip.samples**2))
    assert rms == pytest.approx(0.5 / np.sqrt(2), rel=0.01)
    assert np.max(np.abs(clip.samples)) == pytest.approx(0.5, rel=0.01)


def test_third_harmonic_energy_concentrates_at_1320_hz():
    clip = harmonic_synth(np.full(250, 440.0), constant_controls(250, 0.25, one_hot(2)), SR)
    power = np.abs(np.fft.rfft(clip.samples)) ** 2
    bin_hz = SR / len(clip)
    center = int(round(1320 / bin_hz))
    assert power[center - 2 : center + 3].sum() >= 0.99 * power.sum()


def test_zero_amplitude_is_silent():
    clip = harmonic_synth(np.full(40, 220.0), constant_controls(40, 0.0, np.full(8, 1 / 8)), SR)
    np.testing.assert_array_equal(clip.samples, 0.0)


def test_harmonics_at_or_above_nyquist_are_muted():
    clip = harmonic_synth(np.full(250, 3000.0), constant_controls(250, 0.8, np.full(8, 1 / 8)), SR)
    freqs, psd = welch(clip.samples, fs=SR, nperseg=1024)
    assert psd[freqs > 7000].sum() < 1e-6 * psd.sum()
    assert psd[np.abs(freqs - 6000) < 50].sum() > 0.3 * psd.sum()


def test_output_is_linear_in_amplitude():
    f0 = np.linspace(150.0, 300.0, 30)
    harmonics = np.random.default_rng(0).dirichlet(np.ones(8))
    once = harmonic_synth(f0, constant_controls(30, 0.2, harmonics), SR).samples
    twice = harmonic_synth(f0, constant_controls(30, 0.4, harmonics), SR).samples
    np.testing.assert_allclose(twice, 2.0 * once, atol=1e-12)


def test_block_rendering_matches_taped_rendering():
    n_frames = 200
    f0 = np.linspace(100.0, 900.0, n_frames)
    controls = constant_controls(n_frames, 0.3, np.random.default_rng(1).dirichlet(np.ones(8)))
    blocked = harmonic_signal(f0, controls, SR).data
    with Tape() as tape:
        taped = harmonic_signal(tape.watch(f0), controls, SR).data
    assert blocked.shape == (n_frames * HOP,)
    np.testing.assert_allclose(blocked, taped, atol=1e-8)


def test_harmonic_input_errors():
    controls = constant_controls(10, 0.5, one_hot(0))
    with pytest.raises(ShapeError):
        harmonic_signal(np.full(9, 220.0), controls, SR)
    with pytest.raises(DomainError):
        harmonic_signal(np.full(10, -1.0), controls, SR)
    with pytest.raises(ConfigurationError):
        harmonic_signal(np.full(10, 220.0), controls, 16001)


def test_upsampled_controls_hit_their_knots():
    values = np.array([0.0, 1.0, -2.0, 5.0])
    up = upsample_controls(values, HOP).data
    assert up.shape == (4 * HOP,)
    np.testing.assert_allclose(up[:: HOP], values)
    assert up[HOP // 2] == pytest.approx(0.5)
    np.testing.assert_allclose(up[3 * HOP :], 5.0)


def test_upsampling_keeps_constants_and_ramps():
    np.testing.assert_allclose(upsample_controls(np.full((6, 3), 0.25), HOP).data, 0.25)
    ramp = upsample_controls(np.arange(6.0), 8).data
    np.testing.assert_allclose(ramp[: 5 * 8 + 1], np.arange(5 * 8 + 1) / 8.0)


def test_upsampling_rejects_bad_input():
    with pytest.raises(ShapeError):
        upsample_controls(np.zeros(0), HOP)
    with pytest.raises(ConfigurationError):
        upsample_controls(np.zeros(4), 0)


def test_frequency_sampling_basis_shape_and_symmetry():
    basis = frequency_sampling_basis(17)
    assert basis.shape == (17, 33)
    np.testing.assert_allclose(basis, basis[:, ::-1], atol=1e-12)
    assert basis[:, 0] == pytest.approx(0.0)


def test_zero_magnitudes_give_silence():
    out = noise_signal(np.zeros((20, 17)), HOP, seed=1).data
    assert out.shape == (20 * HOP,)
    np.testing.assert_allclose(out, 0.0, atol=1e-12)


def test_flat_magnitudes_give_flat_noise():
    n_frames = 500
    out = noise_signal(np.full((n_frames, 65), 0.5), HOP, seed=2).data
    freqs, psd = welch(out, fs=SR, nperseg=256)
    band = psd[2:-2]
    level_db = 10 * np.log10(band / np.median(band))
    assert np.all(np.abs(level_db) < 3.0)


def test_noise_level_scales_with_magnitude():
    quiet = noise_signal(np.full((50, 17), 0.1), HOP, seed=3).data
    loud = noise_signal(np.full((50, 17), 0.3), HOP, seed=3).data
    ratio = np.sqrt(np.mean(loud**2)) / np.sqrt(np.mean(quiet**2))
    assert ratio == pytest.approx(3.0, rel=1e-9)


def test_lowpass_magnitudes_attenuate_the_stopband():
    mags = np.zeros((500, 65))
    mags[:, :17] = 1.0
    out = noise_signal(mags, HOP, seed=4).data
    freqs, psd = welch(out, fs=SR, nperseg=512)
    passband = psd[(freqs > 100) & (freqs < 1500)].mean()
    stopband = psd[freqs > 4000].mean()
    assert 10 * np.log10(passband / stopband) >= 40.0


def test_noise_is_seeded():
    mags = np.random.default_rng(5).uniform(0, 1, size=(30, 17))
    a = noise_synth(mags, HOP, seed=7, sample_rate=SR).samples
    b = noise_synth(mags, HOP, seed=7, sample_rate=SR).samples
    c = noise_synth(mags, HOP, seed=8, sample_rate=SR).samples
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)


def test_noise_shape_errors():
    with pytest.raises(ShapeError):
        noise_signal(np.zeros((10, 1)), HOP, seed=0)
    with pytest.raises(ShapeError):
        noise_signal(np.zeros(10), HOP, seed=0)


def test_render_is_the_sum_of_both_paths():
    f0 = np.linspace(200.0, 260.0, 25)
    controls = constant_controls(25, 0.3, np.full(8, 1 / 8), noise_level=0.05)
    mixed = render(f0, controls, SR, seed=9)
    harmonic = harmonic_synth(f0, controls, SR).samples
    noise = noise_synth(controls.noise_mags, HOP, seed=9, sample_rate=SR).samples
    assert mixed.sample_rate == SR
    np.testing.assert_allclose(mixed.samples, harmonic + noise, atol=1e-12)


def test_loss_gradient_through_the_synthesizer_matches_finite_differences():
    rng = np.random.default_rng(10)
    n_frames = 4
    f0 = np.array([300.0, 310.0, 320.0, 330.0])
    target = rng.normal(scale=0.1, size=n_frames * HOP)
    cfg = LossConfig(fft_sizes=(128, 64))

    def loss_of(amp_logits, harm_logits, noise_logits):
        controls = SynthControls(
            amplitude=exp_sigmoid(amp_logits),
            harmonics=ops.softmax(harm_logits, axis=-1),
            noise_mags=exp_sigmoid(noise_logits),
            frame_rate=FRAME_RATE,
        )
        return multiscale_spectral_loss(render_signal(f0, controls, SR, seed=0), target, cfg)

    params = [rng.normal(size=n_frames), rng.normal(size=(n_frames, 8)), rng.normal(size=(n_frames, 17)) - 2.0]
    _, grads = value_and_grad(loss_of, *params)

    eps = 1e-6
    for i, (param, grad) in enumerate(zip(params, grads)):
        for pos in list(np.ndindex(param.shape))[:5]:
            plus = [p.copy() for p in params]
            minus = [p.copy() for p in params]
            plus[i][pos] += eps
            minus[i][pos] -= eps
            numeric = (loss_of(*plus).item() - loss_of(*minus).item()) / (2 * eps)
            assert grad[pos] == pytest.approx(numeric, rel=1e-3, abs=1e-6)
