"""Package entrypoint: the `vocal-timbre-fx` command line."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from vocal_timbre_fx.config import (
    DEFAULT_CONFIG,
    PipelineConfig,
    config_hash,
    dump_config,
    load_config,
    with_overrides,
)
from vocal_timbre_fx.errors import ConfigurationError
from vocal_timbre_fx.services.cross_synthesis import CrossSynthesisService
from vocal_timbre_fx.services.feature_extraction import FeatureExtractionService
from vocal_timbre_fx.services.inspection import InspectionService
from vocal_timbre_fx.services.resynthesis import ResynthesisService
from vocal_timbre_fx.services.synth_data import SynthDataService
from vocal_timbre_fx.services.training import MixSpec, TrainingService

logger = logging.getLogger("vocal_timbre_fx")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

LOG_FORMAT = "%(asctime)s | %(levelname)-7s | %(message)s"


def interpolation_factor(text: str) -> float:
    """argparse type for p: a number in [0, 1]."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"p must be a number, got {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"p must lie in [0, 1], got {value}")
    return value


def sweep_values(text: str) -> List[float]:
    return [interpolation_factor(part) for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vocal-timbre-fx",
        description="Neural vocal timbre effects: analysis, training, resynthesis and cross-synthesis.",
    )
    parser.add_argument("--config", type=Path, help="TOML config file; flags override it.")
    parser.add_argument("--seed", type=int, help="Seed for initialization, window sampling and noise.")
    parser.add_argument("--dump-config", type=Path, help="Write the effective config to this TOML file.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log debug messages.")
    parser.add_argument("--log-file", type=Path, help="Also write the log to this file.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="Extract f0, loudness, MFCCs and harmonics to a .feat file.")
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)

    p = sub.add_parser("train", help="Train a decoder (and encoder) from WAV folders.")
    p.add_argument("out_dir", type=Path, help="Directory for checkpoints and the metrics log.")
    p.add_argument("data_dir", type=Path, nargs="?", help="Folder of WAV clips (omit with --mix).")
    p.add_argument("--kind", choices=("timbre", "latent"), default="timbre")
    p.add_argument("--mix", help="VOCAL_DIR:INSTRUMENT_DIR:RATIO, RATIO = vocal share in (0, 1).")
    p.add_argument("--steps", type=int, dest="total_steps")
    p.add_argument("--checkpoint-every", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--clip-length", type=int, help="Training window length in samples.")
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--workers", type=int, help="Threads evaluating batch elements.")

    p = sub.add_parser("resynth", help="Reconstruct or timbre-transfer a clip with a checkpoint.")
    p.add_argument("input", type=Path)
    p.add_argument("checkpoint", type=Path)
    p.add_argument("output", type=Path)

    p = sub.add_parser("xsynth", help="Cross-synthesize: blend predicted and input harmonics.")
    p.add_argument("input", type=Path)
    p.add_argument("checkpoint", type=Path)
    p.add_argument("output", type=Path)
    p.add_argument("--p", type=interpolation_factor, help="Interpolation factor in [0, 1] (default 0.7).")
    p.add_argument("--sweep", type=sweep_values, help="Comma-separated p values; writes <stem>_p<value>.wav each.")

    p = sub.add_parser("inspect", help="Print checkpoint metadata, or list a run directory's checkpoints.")
    p.add_argument("path", type=Path)

    p = sub.add_parser("synth-data", help="Render random synthesizer performances as an instrument dataset.")
    p.add_argument("out_dir", type=Path)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seconds", type=float, default=10.0)
    return parser


def configure_logging(verbose: bool, log_file: Optional[Path]) -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file is not None:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format=LOG_FORMAT, handlers=handlers, force=True)


def effective_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else DEFAULT_CONFIG
    if args.seed is not None:
        cfg = with_overrides(cfg, seed=args.seed)
        cfg = with_overrides(cfg, "train", seed=args.seed)
    if args.command == "train":
        cfg = with_overrides(
            cfg,
            "train",
            total_steps=args.total_steps,
            checkpoint_every=args.checkpoint_every,
            batch_size=args.batch_size,
            clip_length=args.clip_length,
            learning_rate=args.learning_rate,
            workers=args.workers,
        )
    return cfg


def run(args: argparse.Namespace, cfg: PipelineConfig) -> int:
    """Dispatch to the service for `args.command` and map its result to an exit code."""
    if args.command == "features":
        result = FeatureExtractionService(cfg).extract(args.input, args.output)
    elif args.command == "train":
        mix = MixSpec.parse(args.mix) if args.mix else None
        result = TrainingService(cfg).train(args.out_dir, args.kind, data_dir=args.data_dir, mix=mix)
    elif args.command == "resynth":
        result = ResynthesisService(cfg).resynthesize(args.input, args.checkpoint, args.output)
    elif args.command == "xsynth":
        service = CrossSynthesisService(cfg)
        if args.sweep:
            result = service.sweep(args.input, args.checkpoint, args.output, args.sweep)
        else:
            p = cfg.xsynth.p if args.p is None else args.p
            result = service.run(args.input, args.checkpoint, args.output, p)
    elif args.command == "inspect":
        result = InspectionService().inspect(args.path)
        for line in result.lines:
            print(line)
    else:
        result = SynthDataService(cfg).generate(args.out_dir, args.count, args.seconds)

    if result.success:
        logger.info(result.message)
        return EXIT_OK
    logger.error(result.message)
    return EXIT_USAGE if result.usage_error else EXIT_FAILURE


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, print the seed and config hash, and run one command."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.log_file)
    try:
        cfg = effective_config(args)
        if args.dump_config:
            dump_config(cfg, args.dump_config)
    except ConfigurationError as e:
        logger.error(str(e))
        return EXIT_USAGE

    seed = cfg.train.seed if args.command == "train" else cfg.seed
    print(f"seed={seed} config_hash={config_hash(cfg)}")
    try:
        return run(args, cfg)
    except ConfigurationError as e:
        logger.error(str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
