"""Command-line front end: augment, inspect-sidecar, and self-test.

Exit codes: 0 success, 1 runtime failure, 2 flag/usage errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import selftest
from .detections import BoxSelectPolicy, SidecarError, parse_sidecar
from .pipeline import (
    AugmentConfig,
    ConfigError,
    DatasetError,
    LambdaPolicy,
    PipelineError,
    load_dataset,
    run,
)

_BOX_POLICY_MODES = {"max-score": "max-score", "max-area": "max-area", "random": "random-above-threshold"}


def _seed_value(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="demixer",
        description="Deterministic batch data augmentation with detection-guided and classic mixers.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    aug = sub.add_parser("augment", help="materialize an augmented dataset with manifest")
    aug.add_argument("--images", required=True, metavar="DIR", help="root directory of input images")
    aug.add_argument("--labels", required=True, metavar="FILE", help="labels file: path<TAB>class_index per line")
    aug.add_argument("--out", required=True, metavar="DIR", help="output directory for PNGs and manifest")
    aug.add_argument(
        "--method",
        required=True,
        choices=["demix", "cutmix", "mixup", "cutout", "saliencymix"],
        help="augmentation strategy",
    )
    aug.add_argument("--detections", metavar="FILE", help="detection sidecar (required for --method demix)")
    lam = aug.add_mutually_exclusive_group()
    lam.add_argument("--lambda-fixed", type=float, metavar="F", help="use a constant mix ratio")
    lam.add_argument("--lambda-beta", type=float, metavar="A", help="draw mix ratio from Beta(A, A)")
    aug.add_argument("--score-threshold", type=float, default=0.7, metavar="F", help="detection score floor (default 0.7)")
    aug.add_argument(
        "--box-policy",
        choices=sorted(_BOX_POLICY_MODES),
        default="max-score",
        help="how to pick among qualifying detections (default max-score)",
    )
    aug.add_argument("--per-image", type=int, default=1, metavar="N", help="augmented outputs per input image (default 1)")
    aug.add_argument("--seed", type=_seed_value, default=0, metavar="U64", help="master seed (default 0)")
    aug.add_argument("--workers", type=int, default=None, metavar="N", help="worker processes (default: available cores)")

    ins = sub.add_parser("inspect-sidecar", help="validate a detection sidecar and summarize it")
    ins.add_argument("--detections", required=True, metavar="FILE", help="sidecar file to inspect")

    sub.add_parser("self-test", help="run the built-in verification battery")

    flags = sorted(
        {
            opt
            for sp in sub.choices.values()
            for action in sp._actions
            for opt in action.option_strings
            if opt != "-h"
        }
    )
    parser.epilog = "subcommand flags: " + " ".join(flags)
    return parser


def _cmd_augment(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.method == "demix" and not args.detections:
        parser.error("--detections is required when --method demix")

    if args.lambda_fixed is not None:
        policy = LambdaPolicy("fixed", args.lambda_fixed)
    elif args.lambda_beta is not None:
        policy = LambdaPolicy("beta", args.lambda_beta)
    else:
        policy = LambdaPolicy("uniform")

    dataset = load_dataset(args.labels, args.images)
    detections = {}
    if args.detections:
        detections = parse_sidecar(Path(args.detections).read_bytes())
    config = AugmentConfig(
        method=args.method,
        lambda_policy=policy,
        box_policy=BoxSelectPolicy(_BOX_POLICY_MODES[args.box_policy], args.score_threshold),
        master_seed=args.seed,
        outputs_per_image=args.per_image,
        workers=args.workers,
    )
    start = time.perf_counter()
    records = run(config, dataset, detections, args.out)
    elapsed = time.perf_counter() - start
    fallbacks = sum(1 for r in records if r.fallback)
    print(f"wrote {len(records)} samples ({fallbacks} fallbacks) in {elapsed:.2f}s")
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    try:
        sets = parse_sidecar(Path(args.detections).read_bytes())
    except OSError as exc:
        print(f"error: cannot read {args.detections}: {exc}", file=sys.stderr)
        return 1
    except SidecarError as exc:
        print(f"invalid sidecar: {exc}", file=sys.stderr)
        return 1

    print(f"{len(sets)} images")
    scores: list[float] = []
    for key, ds in sets.items():
        print(f"  {key}: {len(ds.boxes)} boxes")
        scores.extend(sb.score for sb in ds.boxes)
    bins = [0] * 10
    for s in scores:
        bins[min(int(s * 10), 9)] += 1
    print("score histogram (bins [0.0,0.1) .. [0.9,1.0]): " + " ".join(str(b) for b in bins))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "augment":
            return _cmd_augment(args, parser)
        if args.command == "inspect-sidecar":
            return _cmd_inspect(args)
        if args.command == "self-test":
            return selftest.run_battery()
        parser.error(f"unknown command {args.command!r}")
    except (DatasetError, SidecarError, ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PipelineError as exc:
        done = exc.completed
        summary = f"{len(done)} ordinals" if len(done) > 20 else ", ".join(map(str, done)) or "none"
        print(f"error: {exc}", file=sys.stderr)
        print(f"warning: partial output, completed ordinals: {summary}", file=sys.stderr)
        return 1
    return 2  # unreachable; argparse enforces a valid subcommand


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
