"""Subcommand handlers. Each returns the process exit code (0 success, 1 partial failure)."""

import argparse
import csv
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import TypeVar

from fibrostage.common.utils import load_json, ordered_map
from fibrostage.core.errors import ConfigError, FibrostageError
from fibrostage.core.logger import get_logger, subject_context
from fibrostage.core.settings import Settings
from fibrostage.cli.overlay import render_overlay, save_overlay
from fibrostage.modules.clf import (
    LogRegModel,
    PatchPrediction,
    load_external_predictions,
    predict_patches,
    train,
    write_predictions,
)
from fibrostage.modules.imgcore import (
    ManifestRecord,
    Mask,
    Study,
    load_mask,
    load_study,
    read_manifest_records,
    save_mask,
    save_volume,
    write_manifest,
)
from fibrostage.modules.imgcore.constants import REFERENCE_MODALITY
from fibrostage.modules.metrics import evaluate_classification, evaluate_segmentation, write_report
from fibrostage.modules.patches import (
    Patch,
    build_training_set,
    extract_patches,
    load_patch_dataset,
    save_patch_dataset,
)
from fibrostage.modules.phantom import CohortEntry, CohortSpec, generate_cohort, write_cohort
from fibrostage.modules.reg import align_study
from fibrostage.modules.staging import (
    CalibrationSample,
    StageResult,
    Thresholds,
    calibrate,
    default_thresholds,
    read_staging_report,
    stage_predictions,
    write_staging_report,
)

logger = get_logger("cli.commands")

T = TypeVar("T")
R = TypeVar("R")

REGISTER_REPORT_HEADER = ("subject_id", "modality", "loss", "identity_loss", "iterations", "status")


# -- shared helpers ---------------------------------------------------------------------------


def _manifest(settings: Settings) -> Path:
    if settings.manifest is None:
        msg = "A manifest is required (--manifest or 'manifest' in the config file)"
        raise ConfigError(msg)
    return settings.manifest


def _out(settings: Settings, name: str, override: str | None = None) -> Path:
    return Path(override) if override else settings.output_dir / name


def _per_subject(
    func: Callable[[T], R],
    items: Sequence[T],
    subject_of: Callable[[T], str],
    jobs: int,
) -> tuple[list[R], list[str]]:
    """Run ``func`` per subject; failures are logged with the subject tag and skipped."""

    def run(item: T) -> tuple[R | None, str | None]:
        subject = subject_of(item)
        with subject_context(subject):
            try:
                return func(item), None
            except FibrostageError as e:
                logger.error("Skipping subject: %s", e)
                return None, subject

    outcomes = ordered_map(run, items, jobs)
    results = [result for result, failed in outcomes if failed is None and result is not None]
    failures = [failed for _, failed in outcomes if failed is not None]
    return results, failures


def _exit_code(failures: Sequence[str]) -> int:
    if failures:
        logger.warning("%d subject(s) failed: %s", len(failures), ", ".join(failures))
        return 1
    return 0


def _load_studies(settings: Settings) -> tuple[list[Study], list[str]]:
    path = _manifest(settings)
    records = read_manifest_records(path)
    return _per_subject(
        lambda r: load_study(r, path.parent, settings.mode),
        records,
        lambda r: r.subject_id,
        settings.jobs,
    )


def _stages(settings: Settings) -> tuple[dict[str, int | None], dict[str, str | None]]:
    records = read_manifest_records(_manifest(settings))
    return {r.subject_id: r.stage for r in records}, {r.subject_id: r.group for r in records}


def _thresholds(settings: Settings, args: argparse.Namespace) -> Thresholds:
    """Command-line taus, then a thresholds file, then the config, then the mode defaults."""
    if getattr(args, "thresholds", None):
        loaded = Thresholds.load(args.thresholds)
        tau1, tau2 = loaded.tau1, loaded.tau2
    else:
        defaults = default_thresholds(settings.mode)
        tau1 = settings.staging.tau1 if settings.staging.tau1 is not None else defaults.tau1
        tau2 = settings.staging.tau2 if settings.staging.tau2 is not None else defaults.tau2
    if getattr(args, "tau1", None) is not None:
        tau1 = args.tau1
    if getattr(args, "tau2", None) is not None:
        tau2 = args.tau2
    return Thresholds(tau1=tau1, tau2=tau2, mode=settings.mode)


def _extract(studies: list[Study], settings: Settings) -> tuple[list[Patch], list[str]]:
    batches, failures = _per_subject(
        lambda s: extract_patches(s, settings.patches),
        studies,
        lambda s: s.subject_id,
        settings.jobs,
    )
    return [p for batch in batches for p in batch], failures


def _print_stage_table(results: Sequence[StageResult]) -> None:
    print(f"{'subject':<16}{'N':>6}{'s':>9}{'y1':>9}{'y4':>9}  task1 task2")
    for r in results:
        print(
            f"{r.subject_id:<16}{r.n_patches:>6}{r.s:>9.4f}{r.y1:>9.4f}{r.y4:>9.4f}"
            f"  {int(r.task1_positive):>5} {int(r.task2_positive):>5}"
        )


# -- register ---------------------------------------------------------------------------------


def _register_one(study: Study, settings: Settings, out_dir: Path) -> tuple[ManifestRecord, list[list[str]]]:
    aligned = align_study(study, settings.registration_config())
    subject_dir = out_dir / study.subject_id
    rows: list[list[str]] = []
    modalities: dict[str, str] = {}
    for name, volume in aligned.study.modalities.items():
        save_volume(volume, subject_dir / f"{name}.nii")
        modalities[name] = f"{study.subject_id}/{name}.nii"
        if name == REFERENCE_MODALITY:
            continue
        result = aligned.results[name]
        result.transform.save(subject_dir / f"{name}.transform.json")
        iterations = sum(level.iterations for level in result.levels)
        rows.append(
            [study.subject_id, name, repr(result.loss), repr(result.identity_loss), str(iterations), result.status.value]
        )
    mask_ref = None
    if study.mask is not None:
        save_mask(study.mask, subject_dir / "mask.nii")
        mask_ref = f"{study.subject_id}/mask.nii"
    record = ManifestRecord(
        subject_id=study.subject_id,
        stage=study.stage,
        mask=mask_ref,
        modalities=modalities,
        group=study.group,
    )
    return record, rows


def cmd_register(args: argparse.Namespace, settings: Settings) -> int:
    """Align every modality to GED4; write transforms, resampled volumes and a report."""
    out_dir = _out(settings, "registration", args.out)
    studies, load_failures = _load_studies(settings)
    outcomes, failures = _per_subject(
        lambda s: _register_one(s, settings, out_dir),
        studies,
        lambda s: s.subject_id,
        settings.jobs,
    )

    rows = [row for _, subject_rows in outcomes for row in subject_rows]
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "register_report.csv").open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(REGISTER_REPORT_HEADER)
        writer.writerows(rows)
    write_manifest([record for record, _ in outcomes], out_dir / "aligned_manifest.json")

    print(f"{'subject':<16}{'modality':<10}{'loss':>12}{'iterations':>12}")
    for row in rows:
        print(f"{row[0]:<16}{row[1]:<10}{float(row[2]):>12.6f}{row[4]:>12}")
    return _exit_code(load_failures + failures)


# -- extract / train / predict -----------------------------------------------------------------


def cmd_extract(args: argparse.Namespace, settings: Settings) -> int:
    """Write the patches of every subject (or a balanced training set) to a dataset file."""
    studies, failures = _load_studies(settings)
    if args.training:
        patches = build_training_set(studies, settings.patches, settings.jobs)
        out = _out(settings, "training_patches.fbp", args.out)
    else:
        patches, extract_failures = _extract(studies, settings)
        failures += extract_failures
        out = _out(settings, "patches.fbp", args.out)
    save_patch_dataset(patches, out, channels=settings.mode.channels, patch_size=settings.patches.patch_size)
    return _exit_code(failures)


def _train_from_manifest(settings: Settings) -> tuple[LogRegModel, list[str]]:
    studies, failures = _load_studies(settings)
    training = [s for s in studies if s.stage in (1, 4) and s.mask is not None]
    patches = build_training_set(training, settings.patches, settings.jobs)
    return train(patches, settings.training_config()), failures


def cmd_train(args: argparse.Namespace, settings: Settings) -> int:
    """Fit the baseline classifier on a patch dataset or on the manifest's Stage-1/4 subjects."""
    if args.patches:
        model, failures = train(load_patch_dataset(args.patches), settings.training_config()), []
    else:
        model, failures = _train_from_manifest(settings)
    model.save(_out(settings, "model.json", args.out))
    return _exit_code(failures)


def cmd_predict(args: argparse.Namespace, settings: Settings) -> int:
    """Classify patches from a dataset file or extracted from the manifest."""
    model = LogRegModel.load(args.model)
    failures: list[str] = []
    if args.patches:
        patches = load_patch_dataset(args.patches)
    else:
        studies, failures = _load_studies(settings)
        patches, extract_failures = _extract(studies, settings)
        failures += extract_failures
    write_predictions(predict_patches(model, patches), _out(settings, "predictions.csv", args.out))
    return _exit_code(failures)


# -- calibrate / stage ------------------------------------------------------------------------


def cmd_calibrate(args: argparse.Namespace, settings: Settings) -> int:
    """Fit tau1/tau2 on subject scores of labeled validation subjects."""
    stages, _ = _stages(settings)
    scored = stage_predictions(load_external_predictions(args.predictions), default_thresholds(settings.mode))
    samples = [
        CalibrationSample(subject_id=r.subject_id, s=r.s, stage=stage)
        for r in scored
        if (stage := stages.get(r.subject_id)) is not None
    ]
    thresholds = calibrate(samples, settings.staging.folds, settings.staging.grid_step, settings.mode)
    thresholds.save(_out(settings, "thresholds.json", args.out))
    print(f"tau1={thresholds.tau1:.4f} tau2={thresholds.tau2:.4f} ({len(samples)} subjects)")
    return 0


def cmd_stage(args: argparse.Namespace, settings: Settings) -> int:
    """Score, map and decide every subject in a prediction file."""
    thresholds = _thresholds(settings, args)
    results = stage_predictions(load_external_predictions(args.predictions), thresholds)
    write_staging_report(results, _out(settings, "staging_report.csv", args.out))
    _print_stage_table(results)
    return 0


# -- pipeline ---------------------------------------------------------------------------------


def cmd_pipeline(args: argparse.Namespace, settings: Settings) -> int:
    """Extract, classify, score and stage every subject; evaluate when stages are known."""
    failures: list[str] = []
    if args.predictions:
        predictions = load_external_predictions(args.predictions)
    else:
        studies, failures = _load_studies(settings)
        if args.register:
            aligned, reg_failures = _per_subject(
                lambda s: align_study(s, settings.registration_config()).study,
                studies,
                lambda s: s.subject_id,
                settings.jobs,
            )
            studies, failures = aligned, failures + reg_failures
        if args.model:
            model = LogRegModel.load(args.model)
        else:
            training = [s for s in studies if s.stage in (1, 4) and s.mask is not None]
            model = train(build_training_set(training, settings.patches, settings.jobs), settings.training_config())
            model.save(settings.output_dir / "model.json")
        patches, extract_failures = _extract(studies, settings)
        failures += extract_failures
        predictions = predict_patches(model, patches)
        write_predictions(predictions, settings.output_dir / "predictions.csv")

    thresholds = _thresholds(settings, args)
    results = stage_predictions(predictions, thresholds)
    write_staging_report(results, _out(settings, "staging_report.csv", args.out))
    _print_stage_table(results)

    if settings.manifest is not None:
        stages, groups = _stages(settings)
        if any(stages.get(r.subject_id) is not None for r in results):
            report = evaluate_classification(results, stages, groups)
            write_report(report, settings.output_dir / "evaluation.json")
            print(f"task1 AUC={report.auc_task1} ACC={report.acc_task1}")
            print(f"task2 AUC={report.auc_task2} ACC={report.acc_task2}")
    return _exit_code(failures)


# -- evaluation -------------------------------------------------------------------------------


def cmd_eval_seg(args: argparse.Namespace, settings: Settings) -> int:
    """Dice and Hausdorff distance for the mask pairs listed in a cases CSV.

    The CSV has columns ``subject_id,modality,predicted,reference``; relative paths are
    resolved against the CSV's directory.
    """
    cases_path = Path(args.cases)
    with cases_path.open(encoding="utf-8", newline="") as f:
        rows = list(csv.DictReader(f))

    def load_case(row: dict[str, str]) -> tuple[str, str, Mask, Mask]:
        base = cases_path.parent
        return (
            row["subject_id"],
            row.get("modality") or REFERENCE_MODALITY,
            load_mask(base / row["predicted"]),
            load_mask(base / row["reference"]),
        )

    cases, failures = _per_subject(load_case, rows, lambda r: r["subject_id"], settings.jobs)
    report = evaluate_segmentation(cases)
    write_report(report, _out(settings, "segmentation.json", args.out))
    print(f"mean Dice={report.mean_dice} mean HD={report.mean_hd} mm")
    for modality, score in report.per_modality.items():
        print(f"  {modality}: Dice={score.dice:.4f} HD={score.hd}")
    return _exit_code(failures)


def cmd_eval_cls(args: argparse.Namespace, settings: Settings) -> int:
    """AUC and accuracy of a staging report against the manifest's stages."""
    stages, groups = _stages(settings)
    report = evaluate_classification(read_staging_report(args.report), stages, groups)
    write_report(report, _out(settings, "evaluation.json", args.out))
    print(f"task1 AUC={report.auc_task1} ACC={report.acc_task1}")
    print(f"task2 AUC={report.auc_task2} ACC={report.acc_task2}")
    for name, tasks in report.groups.items():
        print(f"  {name}: task1 AUC={tasks['task1'].auc} task2 AUC={tasks['task2'].auc}")
    return 0


# -- overlay / phantom ------------------------------------------------------------------------


def cmd_overlay(args: argparse.Namespace, settings: Settings) -> int:
    """Render one subject's patch calls on a GED4 slice as a PNG."""
    path = _manifest(settings)
    records = [r for r in read_manifest_records(path) if r.subject_id == args.subject]
    if not records:
        msg = f"Subject {args.subject} is not in {path}"
        raise ConfigError(msg)
    study = load_study(records[0], path.parent, settings.mode)
    predictions: list[PatchPrediction] = [
        p for p in load_external_predictions(args.predictions) if p.subject_id == args.subject
    ]
    try:
        image = render_overlay(study.reference, predictions, args.slice, settings.patches.patch_size)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    save_overlay(image, _out(settings, f"overlay_{args.subject}_z{args.slice}.png", args.out))
    return 0


def _default_cohort(settings: Settings, count: int) -> CohortSpec:
    fractions = {1: 0.05, 2: 0.3, 3: 0.5, 4: 0.8}
    return CohortSpec.model_validate(
        {
            "base": {"seed": settings.seed, "modalities": list(settings.mode.channels), "contrast_mode": settings.mode},
            "entries": [CohortEntry(lesion_fraction=f, stage=stage, count=count) for stage, f in fractions.items()],
        }
    )


def cmd_phantom(args: argparse.Namespace, settings: Settings) -> int:
    """Generate a synthetic cohort with a manifest and a ground-truth sidecar."""
    if args.cohort:
        cohort = CohortSpec.model_validate(load_json(args.cohort))
    else:
        cohort = _default_cohort(settings, args.count)
    if args.misalign:
        cohort = cohort.model_copy(update={"misalign": True})
    manifest = write_cohort(generate_cohort(cohort), _out(settings, "phantom", args.out))
    print(manifest)
    return 0
