"""Command-line entry point: ``fibrostage <command> [options]``."""

import argparse
import sys
from collections.abc import Callable, Sequence

from pydantic import ValidationError

from fibrostage.common.utils import get_project_metadata
from fibrostage.core.errors import ConfigError, FibrostageError, ManifestError
from fibrostage.core.logger import get_logger, setup_logging
from fibrostage.core.settings import Settings, load_settings
from fibrostage.cli import commands

logger = get_logger("cli")

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2

Handler = Callable[[argparse.Namespace, Settings], int]


def _unit_interval(value: str) -> float:
    tau = float(value)
    if not 0.0 < tau < 1.0:
        msg = f"threshold must lie in (0, 1), got {value}"
        raise argparse.ArgumentTypeError(msg)
    return tau


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (default: data/config.json if present)")
    common.add_argument("--manifest", help="Subject manifest (overrides the config)")
    common.add_argument("--output-dir", help="Directory for every output file")
    common.add_argument("--mode", choices=["noncontrast", "contrast"], help="Channel layout")
    common.add_argument("--seed", type=int, help="Random seed")
    common.add_argument("--jobs", type=int, help="Subjects processed in parallel")
    common.add_argument("--log-level", choices=["debug", "info", "warning", "error"], help="Console log level")
    return common


def build_parser() -> argparse.ArgumentParser:
    name, version, description = get_project_metadata()
    parser = argparse.ArgumentParser(prog=name, description=description)
    parser.add_argument("--version", action="version", version=f"{name} {version}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()

    def add(command: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(command, parents=[common], help=help_text, description=help_text)
        p.add_argument("--out", help="Output path (default: inside --output-dir)")
        p.set_defaults(handler=handler)
        return p

    add("register", commands.cmd_register, "Register every modality to GED4")

    p = add("extract", commands.cmd_extract, "Extract patches to a dataset file")
    p.add_argument("--training", action="store_true", help="Labeled, class-balanced Stage-1/4 set")

    p = add("train", commands.cmd_train, "Train the baseline patch classifier")
    p.add_argument("--patches", help="Labeled patch dataset (default: extract from the manifest)")

    p = add("predict", commands.cmd_predict, "Classify patches with a trained model")
    p.add_argument("--model", required=True, help="Model JSON")
    p.add_argument("--patches", help="Patch dataset (default: extract from the manifest)")

    p = add("calibrate", commands.cmd_calibrate, "Calibrate tau1/tau2 on labeled subjects")
    p.add_argument("--predictions", required=True, help="Prediction CSV")

    for command, handler, help_text in (
        ("stage", commands.cmd_stage, "Stage subjects from patch predictions"),
        ("pipeline", commands.cmd_pipeline, "Extract, classify, score and stage"),
    ):
        p = add(command, handler, help_text)
        p.add_argument("--thresholds", help="Thresholds JSON from 'calibrate'")
        p.add_argument("--tau1", type=_unit_interval, help="Stage 1 vs 2-4 threshold")
        p.add_argument("--tau2", type=_unit_interval, help="Stage 4 vs 1-3 threshold")
        if command == "stage":
            p.add_argument("--predictions", required=True, help="Prediction CSV")
        else:
            source = p.add_mutually_exclusive_group()
            source.add_argument("--model", help="Model JSON (default: train on Stage-1/4 subjects)")
            source.add_argument("--predictions", help="External prediction CSV")
            p.add_argument("--register", action="store_true", help="Align modalities to GED4 first")

    p = add("eval-seg", commands.cmd_eval_seg, "Dice and Hausdorff distance of mask pairs")
    p.add_argument("--cases", required=True, help="CSV: subject_id,modality,predicted,reference")

    p = add("eval-cls", commands.cmd_eval_cls, "AUC and accuracy of a staging report")
    p.add_argument("--report", required=True, help="Staging report CSV")

    p = add("overlay", commands.cmd_overlay, "Render patch predictions on a GED4 slice")
    p.add_argument("--subject", required=True)
    p.add_argument("--predictions", required=True, help="Prediction CSV")
    p.add_argument("--slice", type=int, required=True, help="Axial slice index")

    p = add("phantom", commands.cmd_phantom, "Generate a synthetic cohort")
    p.add_argument("--cohort", help="Cohort JSON (default: four stages)")
    p.add_argument("--count", type=int, default=4, help="Subjects per stage for the default cohort")
    p.add_argument("--misalign", action="store_true", help="Plant random rigid transforms")
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    overrides = {
        "manifest": args.manifest,
        "output_dir": args.output_dir,
        "mode": args.mode,
        "seed": args.seed,
        "jobs": args.jobs,
        "logging__level": args.log_level,
    }
    return load_settings(args.config, **overrides)


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code: 0 success, 1 partial failure, 2 invalid input."""
    args = build_parser().parse_args(argv)
    try:
        settings = _settings(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    setup_logging(settings.logging, settings.output_dir)
    logger.info("Running %s", args.command)
    try:
        return args.handler(args, settings)
    except (ConfigError, ManifestError, ValidationError) as e:
        logger.error("Invalid input: %s", e)
        return EXIT_CONFIG
    except FibrostageError as e:
        logger.error("%s failed: %s", args.command, e)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
