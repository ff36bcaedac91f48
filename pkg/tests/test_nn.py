import json
from pathlib import Path

import numpy as np
import pytest

from vocal_timbre_fx.autodiff import Tape, backward, ops, watch_all
from vocal_timbre_fx.container import decode_container, encode_container
from vocal_timbre_fx.errors import (
    ArchitectureMismatchError,
    CheckpointVersionError,
    CorruptCheckpointError,
    ShapeError,
)
from vocal_timbre_fx.models import MfccTrack
from vocal_timbre_fx.nn import (
    Architecture,
    ModelCheckpoint,
    NormalizationStats,
    decoder_forward,
    encoder_forward,
    exp_sigmoid,
    init_decoder_params,
    init_encoder_params,
    load_checkpoint,
    save_checkpoint,
)
from vocal_timbre_fx.nn.checkpoint import CHECKPOINT_MAGIC, CHECKPOINT_VERSION, encode_checkpoint, list_checkpoints
from vocal_timbre_fx.nn.layers import gru
from vocal_timbre_fx.training.trainer import init_params

ARCH = Architecture(n_harmonics=6, noise_bins=5, hidden_size=8, encoder_hidden_size=6, latent_size=0, n_mfcc=13)
LATENT = Architecture(n_harmonics=6, noise_bins=5, hidden_size=8, encoder_hidden_size=6, latent_size=3, n_mfcc=13)
STATS = NormalizationStats(loudness_mean=-30.0, loudness_std=12.0)
FIXTURES = Path(__file__).parent / "fixtures"


def conditioning(n_frames=20, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(100.0, 500.0, n_frames), rng.uniform(-70.0, -10.0, n_frames)


def test_harmonic_head_rows_lie_on_the_simplex():
    f0, loudness = conditioning()
    controls = decoder_forward(init_decoder_params(ARCH, 1), ARCH, STATS, f0, loudness, 250)
    harmonics = controls.harmonics.data
    assert harmonics.shape == (20, 6)
    assert np.all(harmonics >= 0)
    np.testing.assert_allclose(harmonics.sum(axis=1), 1.0, atol=1e-5)


def test_amplitude_and_noise_heads_are_positive_and_bounded():
    f0, loudness = conditioning()
    params = {k: v * 25.0 for k, v in init_decoder_params(ARCH, 2).items()}
    controls = decoder_forward(params, ARCH, STATS, f0, loudness, 250)
    for head in (controls.amplitude.data, controls.noise_mags.data):
        assert np.all(head > 0)
        assert np.all(head <= 2.0 + 1e-7)


def test_zero_output_projection_gives_uniform_harmonics():
    params = init_decoder_params(ARCH, 3)
    params["decoder.harmonics.w"] = np.zeros_like(params["decoder.harmonics.w"])
    f0, loudness = conditioning()
    harmonics = decoder_forward(params, ARCH, STATS, f0, loudness, 250).harmonics.data
    np.testing.assert_allclose(harmonics, 1.0 / 6.0, atol=1e-12)


def test_decoder_is_deterministic():
    f0, loudness = conditioning()
    a = decoder_forward(init_decoder_params(ARCH, 4), ARCH, STATS, f0, loudness, 250)
    b = decoder_forward(init_decoder_params(ARCH, 4), ARCH, STATS, f0, loudness, 250)
    np.testing.assert_array_equal(a.harmonics.data, b.harmonics.data)
    np.testing.assert_array_equal(a.noise_mags.data, b.noise_mags.data)


def test_decoder_matches_the_stored_reference_output():
    reference = json.loads((FIXTURES / "decoder_reference.json").read_text(encoding="utf-8"))
    arch = Architecture(**reference["architecture"])
    params = {name: np.asarray(value, dtype=np.float64) for name, value in reference["params"].items()}
    f0 = np.asarray(reference["f0_hz"])
    loudness = np.asarray(reference["loudness_db"])
    controls = decoder_forward(params, arch, NormalizationStats(), f0, loudness, 250)
    expected = reference["expected"]
    np.testing.assert_allclose(controls.amplitude.data, expected["amplitude"], rtol=0, atol=1e-6)
    np.testing.assert_allclose(controls.harmonics.data, expected["harmonics"], rtol=0, atol=1e-6)
    np.testing.assert_allclose(controls.noise_mags.data, expected["noise_mags"], rtol=0, atol=1e-6)


def test_decoder_rejects_mismatched_or_unexpected_inputs():
    f0, loudness = conditioning()
    params = init_decoder_params(ARCH, 0)
    with pytest.raises(ShapeError):
        decoder_forward(params, ARCH, STATS, f0, loudness[:-1], 250)
    with pytest.raises(ShapeError):
        decoder_forward(params, ARCH, STATS, f0, loudness, 250, z=np.zeros((20, 3)))
    with pytest.raises(ShapeError):
        decoder_forward(init_params(LATENT, 0), LATENT, STATS, f0, loudness, 250)


def test_decoder_gradients_match_finite_differences():
    f0, loudness = conditioning(n_frames=4)
    params = init_decoder_params(ARCH, 5)
    names = ["decoder.f0.dense0.w", "decoder.gru.u", "decoder.out.norm0.gamma", "decoder.noise.b"]

    def objective(p):
        c = decoder_forward(p, ARCH, STATS, f0, loudness, 250)
        return ops.sum(c.amplitude) + ops.sum(c.harmonics * np.arange(1.0, 7.0)) + ops.sum(c.noise_mags)

    with Tape() as tape:
        watched = watch_all(tape, params)
        out = objective(watched)
    grads = backward(tape, out)

    eps = 1e-6
    for name in names:
        analytic = grads[watched[name].node_id]
        for pos in list(np.ndindex(params[name].shape))[:6]:
            plus = dict(params)
            minus = dict(params)
            plus[name] = params[name].copy()
            minus[name] = params[name].copy()
            plus[name][pos] += eps
            minus[name][pos] -= eps
            numeric = (objective(plus).item() - objective(minus).item()) / (2 * eps)
            assert analytic[pos] == pytest.approx(numeric, rel=1e-3, abs=1e-6)


def test_exp_sigmoid_range():
    values = exp_sigmoid(np.array([-50.0, 0.0, 50.0])).data
    assert values[0] == pytest.approx(1e-7, abs=1e-9)
    assert values[1] == pytest.approx(2.0 * 0.5 ** np.log(10.0) + 1e-7)
    assert values[2] == pytest.approx(2.0 + 1e-7)


def test_single_gru_step_matches_the_update_equations():
    rng = np.random.default_rng(11)
    hidden, n_in = 4, 3
    params = {
        "g.input.w": rng.normal(size=(n_in, 3 * hidden)),
        "g.input.b": rng.normal(size=3 * hidden),
        "g.u": rng.normal(size=(hidden, 3 * hidden)),
        "g.c": rng.normal(size=3 * hidden),
    }
    x = rng.normal(size=(1, n_in))
    h0 = rng.normal(size=hidden)

    def sigmoid(v):
        return 1.0 / (1.0 + np.exp(-v))

    xw = x[0] @ params["g.input.w"] + params["g.input.b"]
    hu = h0 @ params["g.u"] + params["g.c"]
    r = sigmoid(xw[:hidden] + hu[:hidden])
    z = sigmoid(xw[hidden : 2 * hidden] + hu[hidden : 2 * hidden])
    n = np.tanh(xw[2 * hidden :] + r * hu[2 * hidden :])
    expected = (1 - z) * n + z * h0

    np.testing.assert_allclose(gru(params, "g", x, h0).data[0], expected, atol=1e-10)


def test_zero_mfcc_gives_zero_latent():
    params = init_encoder_params(LATENT, 0)
    z = encoder_forward(params, LATENT, MfccTrack(np.zeros((10, 13)), 250))
    np.testing.assert_array_equal(z.data, 0.0)


def test_encoder_is_deterministic_and_checks_width():
    params = init_encoder_params(LATENT, 0)
    mfcc = MfccTrack(np.random.default_rng(1).normal(size=(12, 13)), 250)
    np.testing.assert_array_equal(encoder_forward(params, LATENT, mfcc).data, encoder_forward(params, LATENT, mfcc).data)
    assert encoder_forward(params, LATENT, mfcc).shape == (12, 3)
    with pytest.raises(ShapeError):
        encoder_forward(params, LATENT, MfccTrack(np.zeros((5, 12)), 250))


def make_checkpoint(arch=LATENT, step=5000):
    return ModelCheckpoint(arch, init_params(arch, 9), STATS, step=step, sample_rate=16000, frame_rate=250, seed=9)


def test_checkpoint_round_trip_is_byte_identical(tmp_path):
    path = tmp_path / "ckpt_5000.bin"
    save_checkpoint(make_checkpoint(), path)
    loaded = load_checkpoint(path)
    assert loaded.step == 5000
    assert loaded.architecture == LATENT
    assert loaded.stats == STATS
    assert encode_checkpoint(loaded) == path.read_bytes()


def test_checkpoint_tensors_survive_save_and_load_exactly(tmp_path):
    ckpt = make_checkpoint()
    path = tmp_path / "ckpt_5000.bin"
    save_checkpoint(ckpt, path)
    loaded = load_checkpoint(path)
    assert sorted(loaded.params) == sorted(ckpt.params)
    for name, value in ckpt.params.items():
        assert value.dtype == loaded.params[name].dtype == np.float64
        assert np.array_equal(value, loaded.params[name]), name


def test_negative_step_in_a_file_is_corrupt(tmp_path):
    path = tmp_path / "ckpt_1.bin"
    container = decode_container(
        encode_checkpoint(make_checkpoint()), CHECKPOINT_MAGIC, (CHECKPOINT_VERSION,), CorruptCheckpointError, CheckpointVersionError
    )
    container.ints["step"] = -3
    path.write_bytes(encode_container(container))
    with pytest.raises(CorruptCheckpointError):
        load_checkpoint(path)


def test_truncated_checkpoint_is_corrupt(tmp_path):
    path = tmp_path / "ckpt_1.bin"
    save_checkpoint(make_checkpoint(), path)
    path.write_bytes(path.read_bytes()[:-7])
    with pytest.raises(CorruptCheckpointError):
        load_checkpoint(path)


def test_unknown_checkpoint_version_is_rejected(tmp_path):
    path = tmp_path / "ckpt_1.bin"
    save_checkpoint(make_checkpoint(), path)
    payload = bytearray(path.read_bytes())
    payload[8:12] = (99).to_bytes(4, "little")
    path.write_bytes(bytes(payload))
    with pytest.raises(CheckpointVersionError):
        load_checkpoint(path)


def test_tensor_shapes_must_match_the_architecture():
    params = init_params(ARCH, 0)
    params["decoder.noise.w"] = np.zeros((8, 4))
    with pytest.raises(ArchitectureMismatchError):
        ModelCheckpoint(ARCH, params, STATS, step=0, sample_rate=16000, frame_rate=250)


def test_list_checkpoints_sorts_by_step(tmp_path):
    for step in (1000, 250, 500):
        save_checkpoint(make_checkpoint(ARCH, step), tmp_path / f"ckpt_{step}.bin")
    (tmp_path / "metrics.tsv").write_text("")
    assert [step for step, _ in list_checkpoints(tmp_path)] == [250, 500, 1000]
