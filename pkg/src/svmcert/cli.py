"""Batch verification front end.

Two subcommands share one flag set:

  * ``verify`` runs every (sample, delta) pair and writes results.csv (one
    row per pair) plus summary.json (per-delta aggregates and the resolved
    run configuration);
  * ``curve`` runs the same sweep but writes only curve.csv, the per-delta
    certified-fraction table.

Samples come from an IDX image/label pair (MNIST-style, sniffed by magic
number) or from delimited text (one feature row per line, one label per
line).  Labels are mapped to the binary problem with --classes A,B: class A
becomes +1, class B becomes -1; any other label in the files is an error.

Both robustness accountings are always emitted: the certified fraction over
all samples, and over correctly classified samples only.  Worker counts
affect wall time only; rows are gathered and ordered by (sample, delta)
before writing, and every verdict is deterministic.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .idx import IMAGE_MAGIC, IdxError, read_idx_images, read_idx_labels
from .model import ModelError, SvmModel, classify, load_model
from .optimizer import OptimizerConfig
from .verifier import VerificationInstance, verify

DEFAULT_SCALE = 1.0 / 255.0


@dataclass(frozen=True)
class RunSpec:
    """Resolved configuration of one batch run (embedded in summary.json)."""

    model: str
    images: str
    labels: str
    classes: tuple
    deltas: tuple
    limit: int = 100
    scale: float = DEFAULT_SCALE
    label_mode: str = "predicted"
    lr_init: float = 1e-3
    lr_final: float = 1e-7
    max_iters: int = 2000
    theta: float = 1e-3
    workers: int = 1
    out_dir: str = "."
    seed: int = 0  # recorded for provenance; verification itself is deterministic

    def __post_init__(self):
        if len(self.classes) != 2 or self.classes[0] == self.classes[1]:
            raise ValueError(f"classes must be two distinct labels, got {self.classes}")
        if not self.deltas:
            raise ValueError("at least one delta is required")
        arr = np.asarray(self.deltas, dtype=np.float64)
        if not (np.isfinite(arr).all() and (arr >= 0).all()):
            raise ValueError(f"deltas must be finite and >= 0, got {self.deltas}")
        if not (np.diff(arr) > 0).all():
            raise ValueError(f"deltas must be strictly increasing, got {self.deltas}")
        if self.limit < 1:
            raise ValueError(f"limit must be >= 1, got {self.limit}")
        if self.scale <= 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")
        if self.label_mode not in ("predicted", "true"):
            raise ValueError(f"label-mode must be 'predicted' or 'true', got {self.label_mode!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(
            lr_init=self.lr_init,
            lr_final=self.lr_final,
            max_iters=self.max_iters,
            theta=self.theta,
        )


@dataclass(frozen=True)
class Record:
    """One verified (sample, delta) pair; labels are the mapped +-1 values."""

    index: int
    true_label: int
    predicted_label: int
    delta: float
    verdict: str
    lower: float
    upper: float
    iterations: int
    ms: float


@dataclass
class DeltaSummary:
    """Aggregates for one delta over the whole sample set."""

    delta: float
    n_samples: int
    n_correct: int
    robust_all: int
    robust_correct: int
    fraction_all: float
    fraction_correct: float
    mean_iterations: float
    mean_ms: float


@dataclass
class Report:
    records: list = field(default_factory=list)
    summaries: list = field(default_factory=list)
    run: Optional[RunSpec] = None


def parse_idx(images_path, labels_path, scale: float = DEFAULT_SCALE, classes=(0, 1)):
    """Load an IDX image/label pair into scaled features and +-1 labels."""
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise IdxError(
            f"image count {images.shape[0]} does not match label count {labels.shape[0]}"
        )
    features = images.reshape(images.shape[0], -1).astype(np.float64) * scale
    return features, _map_labels(labels, classes)


def _map_labels(labels, classes) -> np.ndarray:
    a, b = classes
    labels = np.asarray(labels)
    unknown = ~((labels == a) | (labels == b))
    if unknown.any():
        bad = sorted(set(np.asarray(labels)[unknown].tolist()))
        raise ValueError(f"labels {bad} are not covered by --classes {a},{b}")
    return np.where(labels == a, 1, -1).astype(np.int64)


def _load_text_samples(images_path, labels_path, scale, classes):
    with open(images_path) as fh:
        first = fh.readline()
    delimiter = "," if "," in first else None
    features = np.loadtxt(images_path, delimiter=delimiter, ndmin=2, dtype=np.float64) * scale
    labels = np.loadtxt(labels_path, dtype=np.int64, ndmin=1)
    if features.shape[0] != labels.shape[0]:
        raise ValueError(
            f"feature row count {features.shape[0]} does not match label count {labels.shape[0]}"
        )
    return features, _map_labels(labels, classes)


def load_samples(run: RunSpec):
    """Read the run's sample source (IDX or text) and apply the limit."""
    with open(run.images, "rb") as fh:
        head = fh.read(4)
    if len(head) == 4 and int.from_bytes(head, "big") == IMAGE_MAGIC:
        features, targets = parse_idx(run.images, run.labels, run.scale, run.classes)
    else:
        features, targets = _load_text_samples(run.images, run.labels, run.scale, run.classes)
    if features.shape[0] == 0:
        raise ValueError(f"sample source {run.images} is empty")
    return features[: run.limit], targets[: run.limit]


# Per-process state for the worker pool; set once by the initializer so the
# model is shipped to each worker a single time rather than per task.
_WORKER: dict = {}


def _init_worker(model: SvmModel, config: OptimizerConfig, label_mode: str) -> None:
    _WORKER["model"] = model
    _WORKER["config"] = config
    _WORKER["label_mode"] = label_mode


def _run_task(task) -> Record:
    index, delta, x, y_true = task
    model: SvmModel = _WORKER["model"]
    config: OptimizerConfig = _WORKER["config"]
    y_pred = classify(model, x)
    if _WORKER["label_mode"] == "predicted":
        instance = VerificationInstance.for_model(model, x, delta)
    else:
        instance = VerificationInstance.for_model(model, x, delta, label_mode="given", label=int(y_true))
    verdict = verify(model, instance, config)
    return Record(
        index=int(index),
        true_label=int(y_true),
        predicted_label=int(y_pred),
        delta=float(delta),
        verdict=verdict.status,
        lower=verdict.certified_lower,
        upper=verdict.best_upper,
        iterations=verdict.iterations,
        ms=verdict.wall_ms,
    )


def run_verification(run: RunSpec) -> Report:
    """Verify every (sample, delta) pair and aggregate per-delta summaries."""
    model = load_model(run.model)
    features, targets = load_samples(run)
    config = run.optimizer_config()
    tasks = [
        (i, delta, features[i], targets[i])
        for i in range(features.shape[0])
        for delta in run.deltas
    ]
    if run.workers == 1:
        _init_worker(model, config, run.label_mode)
        records = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(
            max_workers=run.workers,
            initializer=_init_worker,
            initargs=(model, config, run.label_mode),
        ) as pool:
            chunk = max(1, len(tasks) // (run.workers * 4))
            records = list(pool.map(_run_task, tasks, chunksize=chunk))
    records.sort(key=lambda r: (r.index, r.delta))

    summaries = []
    for delta in run.deltas:
        rows = [r for r in records if r.delta == delta]
        n = len(rows)
        correct = [r for r in rows if r.predicted_label == r.true_label]
        robust_all = sum(r.verdict == "robust" for r in rows)
        robust_correct = sum(r.verdict == "robust" for r in correct)
        summaries.append(
            DeltaSummary(
                delta=float(delta),
                n_samples=n,
                n_correct=len(correct),
                robust_all=robust_all,
                robust_correct=robust_correct,
                fraction_all=robust_all / n,
                fraction_correct=robust_correct / len(correct) if correct else 0.0,
                mean_iterations=float(np.mean([r.iterations for r in rows])),
                mean_ms=float(np.mean([r.ms for r in rows])),
            )
        )
    return Report(records=records, summaries=summaries, run=run)


def _float(v) -> str:
    return repr(float(v))


def write_results_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(
            ["index", "true_label", "predicted_label", "delta", "verdict",
             "lower", "upper", "iterations", "ms"]
        )
        for r in records:
            out.writerow(
                [r.index, r.true_label, r.predicted_label, _float(r.delta), r.verdict,
                 _float(r.lower), _float(r.upper), r.iterations, _float(r.ms)]
            )


def write_summary_json(path, report: Report) -> None:
    payload = {
        "run": asdict(report.run),
        "per_delta": [asdict(s) for s in report.summaries],
    }
    with open(path, "w", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_curve_csv(path, summaries) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["delta", "fraction_all", "fraction_correct", "mean_iterations", "mean_ms"])
        for s in summaries:
            out.writerow(
                [_float(s.delta), _float(s.fraction_all), _float(s.fraction_correct),
                 _float(s.mean_iterations), _float(s.mean_ms)]
            )


def cmd_verify(run: RunSpec) -> Report:
    report = run_verification(run)
    os.makedirs(run.out_dir, exist_ok=True)
    write_results_csv(os.path.join(run.out_dir, "results.csv"), report.records)
    write_summary_json(os.path.join(run.out_dir, "summary.json"), report)
    return report


def cmd_curve(run: RunSpec) -> Report:
    report = run_verification(run)
    os.makedirs(run.out_dir, exist_ok=True)
    write_curve_csv(os.path.join(run.out_dir, "curve.csv"), report.summaries)
    return report


def _parse_classes(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"--classes expects two comma-separated labels, got {text!r}")
    try:
        return (int(parts[0]), int(parts[1]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--classes labels must be integers: {exc}")


def _parse_deltas(text: str):
    try:
        return tuple(float(p) for p in text.split(",") if p != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--deltas must be comma-separated numbers: {exc}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svmcert",
        description="Certify local adversarial robustness of kernel SVM binary classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("verify", "per-sample verification sweep; writes results.csv and summary.json"),
        ("curve", "per-delta certified-fraction table; writes curve.csv"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--model", required=True, help="model JSON file")
        p.add_argument("--images", required=True, help="IDX image file or delimited feature rows")
        p.add_argument("--labels", required=True, help="IDX label file or one label per line")
        p.add_argument(
            "--classes", required=True, type=_parse_classes, metavar="A,B",
            help="two dataset labels; A maps to +1, B to -1",
        )
        p.add_argument("--limit", type=int, default=100, help="verify at most this many samples (default 100)")
        p.add_argument(
            "--deltas", required=True, type=_parse_deltas, metavar="d1,d2,...",
            help="strictly increasing perturbation radii in scaled feature units",
        )
        p.add_argument(
            "--scale", type=float, default=DEFAULT_SCALE,
            help="factor applied to raw feature/pixel values (default 1/255)",
        )
        p.add_argument(
            "--label-mode", choices=("predicted", "true"), default="predicted",
            help="defend the model's own prediction, or the dataset label",
        )
        p.add_argument("--lr-init", type=float, default=1e-3, help="initial ascent step size")
        p.add_argument("--lr-final", type=float, default=1e-7, help="final ascent step size")
        p.add_argument("--max-iters", type=int, default=2000, help="ascent iteration budget")
        p.add_argument("--theta", type=float, default=1e-3, help="duality-gap stopping tolerance")
        p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        p.add_argument("--out-dir", default=".", help="directory for the report files")
        p.add_argument("--seed", type=int, default=0, help="recorded in the summary for provenance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = RunSpec(
            model=args.model,
            images=args.images,
            labels=args.labels,
            classes=args.classes,
            deltas=args.deltas,
            limit=args.limit,
            scale=args.scale,
            label_mode=args.label_mode,
            lr_init=args.lr_init,
            lr_final=args.lr_final,
            max_iters=args.max_iters,
            theta=args.theta,
            workers=args.workers,
            out_dir=args.out_dir,
            seed=args.seed,
        )
        report = cmd_verify(run) if args.command == "verify" else cmd_curve(run)
    except (ModelError, IdxError, ValueError, OSError) as exc:
        print(f"svmcert: error: {exc}", file=sys.stderr)
        return 1
    for s in report.summaries:
        print(
            f"delta={s.delta:g}: robust {s.robust_all}/{s.n_samples} of all, "
            f"{s.robust_correct}/{s.n_correct} of correctly classified"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
