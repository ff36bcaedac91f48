import numpy as np
import pytest

from vocal_timbre_fx.audio import read_wav, write_wav
from vocal_timbre_fx.config import DEFAULT_CONFIG, dump_config
from vocal_timbre_fx.features import load_features
from vocal_timbre_fx.main import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from vocal_timbre_fx.models import AudioClip
from vocal_timbre_fx.nn import Architecture, ModelCheckpoint, NormalizationStats, save_checkpoint
from vocal_timbre_fx.services.cross_synthesis import CrossSynthesisService
from vocal_timbre_fx.training.trainer import init_params

from conftest import SR, harmonic_tone


@pytest.fixture
def voice(tmp_path):
    path = tmp_path / "voice.wav"
    write_wav(harmonic_tone(220.0, [0.3, 0.12, 0.06], seconds=0.5), path)
    return path


def write_checkpoint(path, latent_size=0, step=5):
    arch = Architecture(n_harmonics=8, noise_bins=17, hidden_size=8, encoder_hidden_size=8, latent_size=latent_size, n_mfcc=13)
    save_checkpoint(ModelCheckpoint(arch, init_params(arch, 1), NormalizationStats(), step, SR, 250), path)
    return path


def test_features_verb_writes_a_dump(voice, tmp_path, capsys):
    out = tmp_path / "voice.feat"
    assert main(["features", str(voice), str(out)]) == EXIT_OK
    assert load_features(out).n_frames == 125
    assert capsys.readouterr().out.startswith("seed=0 config_hash=")


def test_missing_input_is_a_usage_error(tmp_path, capsys):
    missing = tmp_path / "absent.wav"
    assert main(["features", str(missing), str(tmp_path / "x.feat")]) == EXIT_USAGE
    assert str(missing) in capsys.readouterr().err


def test_out_of_range_p_is_rejected_by_the_parser(voice, tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["xsynth", str(voice), str(tmp_path / "c.bin"), str(tmp_path / "o.wav"), "--p", "1.5"])
    assert excinfo.value.code == 2


def test_unknown_verb_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["vocode"])
    assert excinfo.value.code == 2


def test_resynth_writes_audio(voice, tmp_path):
    ckpt = write_checkpoint(tmp_path / "ckpt_5.bin")
    out = tmp_path / "out.wav"
    assert main(["resynth", str(voice), str(ckpt), str(out)]) == EXIT_OK
    clip = read_wav(out)
    assert clip.sample_rate == SR
    assert len(clip) == 0.5 * SR


def test_resynth_of_silence_is_near_silent(tmp_path):
    silence = tmp_path / "silence.wav"
    write_wav(AudioClip(np.zeros(SR // 2), SR), silence)
    ckpt = write_checkpoint(tmp_path / "ckpt_5.bin")
    out = tmp_path / "out.wav"
    assert main(["resynth", str(silence), str(ckpt), str(out)]) == EXIT_OK
    samples = read_wav(out).samples
    assert len(samples) == SR // 2
    assert 20.0 * np.log10(np.sqrt(np.mean(samples**2)) + 1e-12) < -50.0


def test_corrupt_checkpoint_is_a_runtime_failure(voice, tmp_path):
    ckpt = tmp_path / "ckpt_1.bin"
    ckpt.write_bytes(b"VTFXCKPT" + (1).to_bytes(4, "little") + b"\x05")
    assert main(["resynth", str(voice), str(ckpt), str(tmp_path / "o.wav")]) == EXIT_FAILURE


def test_xsynth_defaults_to_p_0_7(voice, tmp_path):
    ckpt = write_checkpoint(tmp_path / "ckpt_5.bin")
    assert main(["xsynth", str(voice), str(ckpt), str(tmp_path / "cli.wav")]) == EXIT_OK
    result = CrossSynthesisService(DEFAULT_CONFIG).run(voice, ckpt, tmp_path / "direct.wav", 0.7)
    assert result.success
    assert (tmp_path / "cli.wav").read_bytes() == (tmp_path / "direct.wav").read_bytes()


def test_xsynth_at_zero_matches_resynth(voice, tmp_path):
    ckpt = write_checkpoint(tmp_path / "ckpt_5.bin")
    assert main(["xsynth", str(voice), str(ckpt), str(tmp_path / "x.wav"), "--p", "0"]) == EXIT_OK
    assert main(["resynth", str(voice), str(ckpt), str(tmp_path / "r.wav")]) == EXIT_OK
    np.testing.assert_array_equal(read_wav(tmp_path / "x.wav").samples, read_wav(tmp_path / "r.wav").samples)


def test_xsynth_sweep(voice, tmp_path):
    ckpt = write_checkpoint(tmp_path / "ckpt_5.bin")
    assert main(["xsynth", str(voice), str(ckpt), str(tmp_path / "s.wav"), "--sweep", "0,0.5,1"]) == EXIT_OK
    assert sorted(p.name for p in tmp_path.glob("s_p*.wav")) == ["s_p0.5.wav", "s_p0.wav", "s_p1.wav"]


def test_xsynth_rejects_latent_checkpoints(voice, tmp_path, capsys):
    ckpt = write_checkpoint(tmp_path / "ckpt_5.bin", latent_size=4)
    assert main(["xsynth", str(voice), str(ckpt), str(tmp_path / "o.wav")]) == EXIT_USAGE
    assert "latent" in capsys.readouterr().err


def test_inspect_checkpoint(tmp_path, capsys):
    ckpt = write_checkpoint(tmp_path / "ckpt_5000.bin", step=5000)
    assert main(["inspect", str(ckpt)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "step: 5000" in out
    assert "kind: timbre" in out


def test_inspect_run_directory(tmp_path, capsys):
    for step in (2, 4):
        write_checkpoint(tmp_path / f"ckpt_{step}.bin", step=step)
    (tmp_path / "metrics.tsv").write_text("1\t3.0\n2\t1.0\n3\t1.0\n4\t0.5\n", encoding="utf-8")
    assert main(["inspect", str(tmp_path)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "step\tsmoothed_loss\tfile"
    assert lines[2] == "2\t2.000000\tckpt_2.bin"
    assert lines[3] == "4\t1.375000\tckpt_4.bin"


def test_train_verb(wav_dir, small_cfg, tmp_path, capsys):
    config = tmp_path / "small.toml"
    dump_config(small_cfg, config)
    run_dir = tmp_path / "run"
    argv = ["--config", str(config), "train", str(run_dir), str(wav_dir), "--steps", "2", "--checkpoint-every", "1"]
    assert main(argv) == EXIT_OK
    assert sorted(p.name for p in run_dir.glob("ckpt_*.bin")) == ["ckpt_1.bin", "ckpt_2.bin"]
    assert (run_dir / "config.toml").exists()
    assert small_cfg.seed == 0
    assert capsys.readouterr().out.startswith(f"seed={small_cfg.train.seed} config_hash=")


def test_train_needs_data(tmp_path):
    assert main(["train", str(tmp_path / "run")]) == EXIT_USAGE


def test_bad_config_file_is_a_usage_error(tmp_path):
    config = tmp_path / "bad.toml"
    config.write_text("[train]\nwarmup = 3\n", encoding="utf-8")
    assert main(["--config", str(config), "inspect", str(tmp_path)]) == EXIT_USAGE


def test_synth_data_verb(tmp_path):
    out = tmp_path / "synths"
    assert main(["--seed", "3", "synth-data", str(out), "--count", "2", "--seconds", "0.5"]) == EXIT_OK
    assert sorted(p.name for p in out.glob("*.wav")) == ["performance_000.wav", "performance_001.wav"]


def test_dump_config(tmp_path):
    dumped = tmp_path / "effective.toml"
    assert main(["--seed", "11", "--dump-config", str(dumped), "inspect", str(tmp_path / "missing.bin")]) == EXIT_USAGE
    assert "seed = 11" in dumped.read_text(encoding="utf-8")
