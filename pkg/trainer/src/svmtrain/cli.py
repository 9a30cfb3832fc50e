"""Command-line entry point for training and exporting benchmark SVMs."""

import argparse
import sys

from . import datasets, experiments, fixture


def _add_common(parser):
    parser.add_argument("--out-dir", default="exports",
                        help="directory receiving one subdirectory per experiment")
    parser.add_argument("--data-root", default=None,
                        help="directory with mnist/ and fmnist/ IDX files "
                             "(default: $SVMTRAIN_DATA or ./data)")
    parser.add_argument("--no-download", action="store_true",
                        help="fail instead of fetching missing dataset files")


def cmd_train(args) -> int:
    spec = experiments.ExperimentSpec(
        dataset=args.dataset,
        classes=tuple(args.classes),
        kernel=args.kernel,
        C=args.C,
        gamma=args.gamma if args.gamma is not None else "scale",
        out_dir=args.out_dir,
    )
    report = experiments.train_export(spec, root=args.data_root,
                                      download=not args.no_download)
    _print_report(report)
    return 0


def cmd_benchmarks(args) -> int:
    for report in experiments.run_benchmarks(out_dir=args.out_dir,
                                             root=args.data_root,
                                             download=not args.no_download):
        _print_report(report)
    return 0


def cmd_fixture(args) -> int:
    report = fixture.build_fixture(args.out_dir, seed=args.seed, C=args.C,
                                   jitter=args.jitter, noise=args.noise)
    print(f"fixture: {report['n_support']} support vectors, "
          f"test accuracy {report['test_accuracy_percent']:.0f}% -> {args.out_dir}")
    return 0


def _print_report(report: dict) -> None:
    ref = report["reference_accuracy"]
    ref_text = f" (reference {ref}%)" if ref is not None else ""
    print(f"{report['experiment']}: accuracy {report['accuracy_first_100']:.0f}%{ref_text}, "
          f"{report['n_support']} support vectors, "
          f"round-trip diff {report['round_trip_max_abs_diff']:.2e}")


def _parse_classes(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated labels, got {text!r}")
    return int(parts[0]), int(parts[1])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svmtrain",
        description="Train benchmark binary SVMs and export them for the verifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train and export one class pair / kernel")
    train.add_argument("--dataset", choices=("mnist", "fmnist"), required=True)
    train.add_argument("--classes", type=_parse_classes, required=True,
                       metavar="A,B", help="positive,negative byte labels")
    train.add_argument("--kernel", choices=experiments.KERNEL_TAGS, required=True)
    train.add_argument("--C", type=float, default=1.0)
    train.add_argument("--gamma", type=float, default=None,
                       help="kernel gamma (default: 1 / (n_features * var))")
    _add_common(train)
    train.set_defaults(func=cmd_train)

    bench = sub.add_parser("benchmarks",
                           help="train and export every benchmark pair and kernel")
    _add_common(bench)
    bench.set_defaults(func=cmd_benchmarks)

    fix = sub.add_parser("fixture",
                         help="generate the synthetic no-download verification fixture")
    fix.add_argument("--out-dir", default="fixtures/rbf-blobs")
    fix.add_argument("--seed", type=int, default=fixture.DEFAULT_SEED)
    fix.add_argument("--C", type=float, default=5.0)
    fix.add_argument("--jitter", type=int, default=3)
    fix.add_argument("--noise", type=float, default=45.0)
    fix.set_defaults(func=cmd_fixture)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (datasets.DatasetUnavailable, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
