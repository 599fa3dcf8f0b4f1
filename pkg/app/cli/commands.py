"""Subcommand implementations. Each returns a process exit status."""

from __future__ import annotations

import logging
import os
from argparse import Namespace
from dataclasses import replace
from pathlib import Path
from typing import Callable

from app.cli.config import RunConfig
from app.data import (
    ClassLabel,
    Manifest,
    ManifestRecord,
    SplitTag,
    augment_rotations,
    group_split,
    load_samples,
    read_any,
    read_manifest,
    records_for,
    resize_square,
    save_image,
    sharpen,
    split_test,
    stack_inputs,
    synth_generate,
    to_8bit,
    validate_manifest,
    write_manifest,
)
from app.data.imageio import PILLOW_SUFFIXES
from app.data.samples import Sample, conform
from app.errors import LeakageError, ManifestError, SheetError
from app.evaluation import (
    accuracy_summary,
    check_model_task,
    evaluate,
    expert_summary,
    format_accuracy,
    parse_truth,
    read_confusion,
    read_sheets,
    render_fixtures,
    render_report,
    run_fixtures,
    two_proportion_test,
    write_confusion,
)
from app.metrics.prometheus_exporter import export_metrics, validation_accuracy_percent
from app.model import FORMAT_VERSION, load_model, predict_proba, save_model
from app.monitoring.logging import attach_run_log, detach_run_log
from app.tensor import Prng, Stream, derive_seed
from app.training import cross_validate, topology_search, train
from app.training.config import SearchSpace

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = frozenset({".pgm"}) | PILLOW_SUFFIXES
MANIFEST_NAME = "manifest.tsv"


def write_run_stanza(run: RunConfig, command: str) -> Path:
    """Reproducibility record: command, seed, config echo and format versions."""

    run.out.mkdir(parents=True, exist_ok=True)
    path = run.out / "run.txt"
    lines = [
        f"command={command}",
        f"seed={run.seed}",
        f"prng={Prng.ALGORITHM}",
        f"model_format_version={FORMAT_VERSION}",
        f"config={run.model_dump_json()}",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _write_text(run: RunConfig, name: str, text: str) -> Path:
    run.out.mkdir(parents=True, exist_ok=True)
    path = run.out / name
    path.write_text(text, encoding="utf-8")
    return path


def _image_path(run: RunConfig, label: ClassLabel, stem: str) -> tuple[Path, str]:
    relative = Path("images") / label.value / f"{stem}.pgm"
    return run.out / relative, relative.as_posix()


def _persist(run: RunConfig, samples: list[Sample], split: SplitTag, suffix: str = "") -> list[ManifestRecord]:
    """Write each sample's pixels under ``out/images`` and return its manifest records."""

    records = []
    for sample in samples:
        stem = Path(sample.path).stem if sample.path else sample.group_id.replace("/", "_")
        if sample.rotation and not stem.endswith(f"_r{sample.rotation}"):
            stem = f"{stem}_r{sample.rotation}"
        target, relative = _image_path(run, sample.label, stem + suffix)
        save_image(target, sample.image)
        records += records_for([replace(sample, path=relative)], split)
    return records


def _rebase(manifest: Manifest, record: ManifestRecord, run: RunConfig) -> ManifestRecord:
    """Same record with its path made relative to the output directory."""

    resolved = manifest.resolve(record).resolve()
    return replace(record, path=Path(os.path.relpath(resolved, run.out.resolve())).as_posix())


def _load_manifest(run: RunConfig, name: str = "manifest") -> Manifest:
    run.require(name)
    manifest = read_manifest(getattr(run, name)).sorted()
    validate_manifest(manifest)
    return manifest


def cmd_ingest(args: Namespace, run: RunConfig) -> int:
    source = Path(args.source)
    if not source.is_dir():
        raise ManifestError(f"{source} is not a directory with class subdirectories 0/, 0.1/, 1/")
    samples: list[Sample] = []
    for label in ClassLabel:
        class_dir = source / label.value
        if not class_dir.is_dir():
            logger.warning("No directory for class %s under %s", label.value, source)
            continue
        for path in sorted(p for p in class_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES):
            image = read_any(path)
            pixels = to_8bit(image.pixels) if image.is_16bit else image.pixels
            samples.append(
                Sample(
                    image=resize_square(pixels, run.input_size),
                    label=label,
                    group_id=f"{label.value}/{path.stem}",
                    path=path.name,
                )
            )
    if not samples:
        raise ManifestError(f"no images found under {source}")
    manifest = Manifest(records=_persist(run, samples, SplitTag.UNASSIGNED), base_dir=run.out).sorted()
    write_manifest(manifest, run.out / MANIFEST_NAME)
    print(f"ingested {len(manifest)} images into {run.out / MANIFEST_NAME}")
    return 0


def cmd_sharpen(args: Namespace, run: RunConfig) -> int:
    manifest = _load_manifest(run)
    records = []
    for record, sample in zip(manifest.records, load_samples(manifest)):
        if record.sharpened:
            records.append(_rebase(manifest, record, run))
            continue
        sharpened = replace(sample, image=sharpen(sample.image), sharpened=True)
        records += _persist(run, [sharpened], record.split, suffix="_s")
    out = Manifest(records=records, base_dir=run.out).sorted()
    validate_manifest(out)
    write_manifest(out, run.out / MANIFEST_NAME)
    print(f"sharpened {len(out)} images")
    return 0


def cmd_augment(args: Namespace, run: RunConfig) -> int:
    manifest = _load_manifest(run)
    records: list[ManifestRecord] = []
    for record, sample in zip(manifest.records, load_samples(manifest)):
        if record.split is SplitTag.TEST:
            records.append(_rebase(manifest, record, run))
            continue
        records += _persist(run, augment_rotations([sample]), record.split)
    out = Manifest(records=records, base_dir=run.out).sorted()
    validate_manifest(out)
    write_manifest(out, run.out / MANIFEST_NAME)
    print(f"augmented manifest holds {len(out)} images")
    return 0


def cmd_split(args: Namespace, run: RunConfig) -> int:
    manifest = _load_manifest(run)
    by_path = {record.path: record for record in manifest.records}
    samples = load_samples(manifest)
    rest, test = split_test(samples, run.per_class, run.seed)
    train_part, val_part = group_split(rest, run.train.val_fraction, run.seed)

    def tagged(part: list[Sample], split: SplitTag) -> list[ManifestRecord]:
        return [_rebase(manifest, replace(by_path[sample.path], split=split), run) for sample in part]

    train_records = tagged(train_part, SplitTag.TRAIN) + tagged(val_part, SplitTag.VAL)
    test_records = tagged(test, SplitTag.TEST)
    base = run.out
    full = Manifest(records=train_records + test_records, base_dir=base).sorted()
    validate_manifest(full)
    write_manifest(full, run.out / MANIFEST_NAME)
    write_manifest(Manifest(records=train_records, base_dir=base).sorted(), run.out / "train_manifest.tsv")
    write_manifest(Manifest(records=test_records, base_dir=base).sorted(), run.out / "test_manifest.tsv")
    print(f"split: {len(train_part)} train, {len(val_part)} validation, {len(test)} test")
    return 0


def _training_samples(run: RunConfig) -> tuple[Manifest, list[Sample], list[Sample]]:
    """Training and validation samples of the task; unassigned records are split by group."""

    manifest = _load_manifest(run)
    leaked = manifest.tagged(SplitTag.TEST).records
    if leaked:
        raise LeakageError(f"{leaked[0].path} is tagged test; refusing to train on test images")
    task = run.task_spec()
    samples = [s for s in load_samples(manifest) if task.includes(s.label)]
    tags = {record.path: record.split for record in manifest.records}
    train_part = [s for s in samples if tags[s.path] is SplitTag.TRAIN]
    val_part = [s for s in samples if tags[s.path] is SplitTag.VAL]
    unassigned = [s for s in samples if tags[s.path] is SplitTag.UNASSIGNED]
    if unassigned:
        extra_train, extra_val = group_split(unassigned, run.train.val_fraction, run.seed)
        train_part += extra_train
        val_part += extra_val
    return manifest, train_part, val_part


def cmd_train(args: Namespace, run: RunConfig) -> int:
    _, train_part, val_part = _training_samples(run)
    task = run.task_spec()
    config = run.model_config_for(task)
    handler = attach_run_log(run.out / "train.log")
    try:
        model, report = train(config, run.train, train_part, val_part, task=task)
    finally:
        detach_run_log(handler)
    validation_accuracy_percent.set(report.best_val_accuracy)
    model_path = run.model_path or run.out / "model.mtcn"
    save_model(model, model_path)
    report.write(run.out)
    export_metrics(run.out / "metrics.prom")
    print(f"best epoch {report.best_epoch}: validation accuracy {format_accuracy(report.best_val_accuracy)}% -> {model_path}")
    return 0


def cmd_cv(args: Namespace, run: RunConfig) -> int:
    _, train_part, val_part = _training_samples(run)
    task = run.task_spec()
    config = run.model_config_for(task)
    handler = attach_run_log(run.out / "train.log")
    try:
        result = cross_validate(config, run.train, train_part + val_part, run.folds, task=task, threads=run.threads)
    finally:
        detach_run_log(handler)
    lines = [f"mean_accuracy={result.mean_accuracy:.4f}"]
    lines += [f"fold_{i + 1}={value:.4f}" for i, value in enumerate(result.fold_accuracies)]
    _write_text(run, "cv_summary.txt", "\n".join(lines) + "\n")
    export_metrics(run.out / "metrics.prom")
    print(f"{run.folds}-fold mean accuracy {format_accuracy(result.mean_accuracy)}%")
    return 0


def cmd_search(args: Namespace, run: RunConfig) -> int:
    _, train_part, val_part = _training_samples(run)
    task = run.task_spec()
    space = SearchSpace.model_validate_json(Path(args.space).read_text(encoding="utf-8")) if args.space else SearchSpace()
    handler = attach_run_log(run.out / "train.log")
    try:
        results = topology_search(
            space,
            run.train,
            train_part + val_part,
            run.budget,
            run.seed,
            num_classes=task.num_classes,
            k=run.folds,
            task=task,
            threads=run.threads,
        )
    finally:
        detach_run_log(handler)
    lines = ["# rank\tmean_accuracy\tparams\tconfig"]
    lines += [
        f"{rank}\t{r.mean_accuracy:.4f}\t{r.params}\t{r.config.model_dump_json()}"
        for rank, r in enumerate(results, start=1)
    ]
    _write_text(run, "search_results.tsv", "\n".join(lines) + "\n")
    best = results[0]
    print(f"best topology: {format_accuracy(best.mean_accuracy)}% with {best.params} parameters")
    return 0


def _test_samples(run: RunConfig) -> list[Sample]:
    """Held-out images only: a ``--test-manifest``, or the test-tagged records of ``--manifest``."""

    if run.test_manifest:
        manifest = _load_manifest(run, "test_manifest")
        seen = manifest.tagged(SplitTag.TRAIN, SplitTag.VAL).records
        if seen:
            raise LeakageError(f"{seen[0].path} is tagged {seen[0].split.value}; refusing to score training images")
        return load_samples(manifest)
    tagged = _load_manifest(run).tagged(SplitTag.TEST)
    if not len(tagged):
        raise LeakageError("manifest has no test-tagged images; run split first or pass --test-manifest")
    return load_samples(tagged)


def _prediction_samples(run: RunConfig) -> list[Sample]:
    return load_samples(_load_manifest(run, "test_manifest" if run.test_manifest else "manifest"))


def cmd_eval(args: Namespace, run: RunConfig) -> int:
    run.require("model_path")
    model = load_model(run.model_path)
    task = run.task_spec()
    check_model_task(model, task)
    cm = evaluate(model, _test_samples(run), task)
    label = args.label or "cnn"
    write_confusion(cm, run.out / f"confusion_{task.name}.tsv")
    _write_text(run, "accuracy.txt", accuracy_summary([(label, cm)]))
    text = render_report([(label, cm)])
    _write_text(run, "report.txt", text)
    export_metrics(run.out / "metrics.prom")
    print(text, end="")
    return 0


def cmd_predict(args: Namespace, run: RunConfig) -> int:
    run.require("model_path")
    model = load_model(run.model_path)
    samples = _prediction_samples(run)
    prepared = conform(samples, model.config.input_size, model.config.sharpen)
    probs = predict_proba(model, stack_inputs(prepared)) if prepared else []
    names = model.config.class_names or tuple(str(i) for i in range(model.config.num_classes))
    lines = ["# path\tpredicted\t" + "\t".join(f"p_{name}" for name in names)]
    for sample, row in zip(samples, probs):
        best = int(row.argmax())
        lines.append(f"{sample.path}\t{names[best]}\t" + "\t".join(f"{p:.6f}" for p in row))
    _write_text(run, "predictions.tsv", "\n".join(lines) + "\n")
    print(f"wrote {len(samples)} predictions to {run.out / 'predictions.tsv'}")
    return 0


def _proportion(raw: str) -> tuple[int, int]:
    """``k/n`` as two integers."""

    k, sep, n = raw.partition("/")
    if not sep or not k.strip().isdigit() or not n.strip().isdigit():
        raise SheetError(f"expected a result as k/n (e.g. 141/200), got {raw!r}")
    return int(k), int(n)


def cmd_stats(args: Namespace, run: RunConfig) -> int:
    k1, n1 = _proportion(args.first)
    k2, n2 = _proportion(args.second)
    test = two_proportion_test(k1, n1, k2, n2)
    text = f"z={test.z:.4f}\np={test.p_value:.6g}\n"
    _write_text(run, "stats.txt", text)
    print(f"{k1}/{n1} vs {k2}/{n2}: z = {test.z:.2f}, two-sided p = {test.p_value:.2e}")
    return 0


def cmd_report(args: Namespace, run: RunConfig) -> int:
    matrices = []
    for raw in args.matrices:
        label, sep, path = raw.partition("=")
        if not sep:
            label, path = Path(raw).stem, raw
        matrices.append((label, read_confusion(Path(path))))
    text = render_report(matrices)
    _write_text(run, "report.txt", text)
    _write_text(run, "accuracy.txt", accuracy_summary(matrices))
    print(text, end="")
    return 0


def cmd_fixtures(args: Namespace, run: RunConfig) -> int:
    text = render_fixtures(run_fixtures())
    _write_text(run, "fixtures.txt", text)
    print(text, end="")
    return 0


def cmd_experts(args: Namespace, run: RunConfig) -> int:
    sheets = read_sheets(Path(args.sheets))
    truth = parse_truth(Path(args.truth).read_text(encoding="utf-8"), source=args.truth)
    lines = ["task\taverage\tbest\tvoting"]
    task = run.task_spec()
    summary = expert_summary(sheets, truth, task)
    lines.append(
        f"{task.name}\t{format_accuracy(summary.average)}\t{format_accuracy(summary.best)}\t{format_accuracy(summary.voting)}"
    )
    write_confusion(summary.voting_matrix, run.out / f"confusion_voting_{task.name}.tsv")
    text = "\n".join(lines) + "\n"
    _write_text(run, "experts.tsv", text)
    print(text, end="")
    return 0


def cmd_synth(args: Namespace, run: RunConfig) -> int:
    samples = []
    for label in ClassLabel:
        for index in range(run.per_class):
            seed = derive_seed(run.seed, Stream.SYNTH, label.index, index)
            sample = synth_generate(label, seed, run.input_size)
            samples.append(replace(sample, path=f"synth_{index:05d}"))
    manifest = Manifest(records=_persist(run, samples, SplitTag.UNASSIGNED), base_dir=run.out).sorted()
    write_manifest(manifest, run.out / MANIFEST_NAME)
    print(f"generated {len(manifest)} synthetic images into {run.out}")
    return 0


COMMANDS: dict[str, Callable[[Namespace, RunConfig], int]] = {
    "ingest": cmd_ingest,
    "sharpen": cmd_sharpen,
    "augment": cmd_augment,
    "split": cmd_split,
    "train": cmd_train,
    "cv": cmd_cv,
    "search": cmd_search,
    "eval": cmd_eval,
    "predict": cmd_predict,
    "stats": cmd_stats,
    "report": cmd_report,
    "fixtures": cmd_fixtures,
    "experts": cmd_experts,
    "synth": cmd_synth,
}
