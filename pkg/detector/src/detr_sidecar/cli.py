"""Command-line entry point: ``detect --images DIR --out FILE [--floor F]``.

Exit codes: 0 on success, 1 on runtime failure (missing directory,
unloadable weights, unwritable output), 2 on flag errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .backend import DEFAULT_WEIGHTS, DetrBackend, WeightsUnavailableError
from .sidecar import SidecarJob, detect_directory


def _floor_value(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"floor {value} outside [0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detect",
        description="Run a pretrained object detector over an image directory "
        "and write the detection sidecar consumed by the demixer engine.",
    )
    parser.add_argument("--images", required=True, metavar="DIR", help="directory of images to scan (recursive)")
    parser.add_argument("--out", required=True, metavar="FILE", help="path of the sidecar JSON to write")
    parser.add_argument(
        "--floor",
        type=_floor_value,
        default=0.5,
        metavar="F",
        help="emission score floor in [0, 1] (default: 0.5)",
    )
    parser.add_argument(
        "--weights",
        default=DEFAULT_WEIGHTS,
        metavar="PATH_OR_ID",
        help=f"model hub id or local checkpoint directory (default: {DEFAULT_WEIGHTS})",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    job = SidecarJob(args.images, args.out, args.floor)
    if not Path(args.images).is_dir():
        print(f"error: images directory not found: {args.images}", file=sys.stderr)
        return 1
    try:
        backend = DetrBackend(args.weights)
    except WeightsUnavailableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        document = detect_directory(job, backend)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    count = len(json.loads(document)["images"])
    print(f"wrote sidecar for {count} images to {args.out}")
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
