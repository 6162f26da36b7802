"""Trace-adapter command line.

    hitrace export --local <model> [--remote <model>] --data <dir> --out <file>
    hitrace synth --spec <spec.json> --out <file>

Models are "module:attr" callables or .npy/.npz precomputed score files; the
dataset directory holds features.npy and labels.npy. Spec files are JSON
objects with SyntheticSpec fields (kind, n, theta, target_offload_count, ...).
Output trace files are JSONL by default (--format csv for the convenience
format) in the simulator's wire format.

Exit codes: 0 success, 1 input error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .export import DatasetError, ModelError, export_trace
from .synth import SpecError, generate_synthetic, spec_from_dict


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hitrace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("export", help="run models over a dataset and dump a trace")
    p.add_argument("--local", required=True, help="local model (module:attr or scores .npy/.npz)")
    p.add_argument("--remote", help="remote model (optional; omitted = oracle remote)")
    p.add_argument("--data", required=True, help="dataset dir with features.npy + labels.npy")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")

    p = sub.add_parser("synth", help="generate a synthetic trace from a JSON spec")
    p.add_argument("--spec", required=True, help="JSON file of SyntheticSpec fields")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.subcommand == "export":
            export_trace(
                args.local,
                args.remote,
                args.data,
                args.out,
                format=args.format,
                metadata={"local_model": args.local, "remote_model": args.remote or "oracle"},
            )
        else:
            try:
                with open(args.spec, "r", encoding="utf-8") as fh:
                    data = json.load(fh)
            except json.JSONDecodeError as exc:
                print(f"hitrace: input error: {args.spec}: {exc}", file=sys.stderr)
                return 1
            generate_synthetic(spec_from_dict(data), args.out, format=args.format)
    except SpecError as exc:
        print(f"hitrace: config error: {exc}", file=sys.stderr)
        return 2
    except (DatasetError, ModelError, FileNotFoundError) as exc:
        print(f"hitrace: input error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
