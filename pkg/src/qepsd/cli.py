"""Command line entry points.

Subcommands: run, roundtrip, sweep, vectors, plot.  Exit codes: 0 success,
1 validation error, 2 I/O error.  QEPSD_OUTPUT_DIR overrides the config's
output_dir; everything else is config-file only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .harness import (
    DEFAULT_VECTOR_COUNT,
    ConfigError,
    ExperimentConfig,
    emit_scatter,
    run_experiment,
    run_roundtrip,
    sweep_snr,
    write_cipher_vectors,
    write_keystream_vectors,
)
from .keystream import Secret

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _load_config(path: str) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json_file(path)
    override = os.environ.get("QEPSD_OUTPUT_DIR")
    if override:
        cfg.output_dir = override
    return cfg


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    report = run_experiment(cfg)
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_roundtrip(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    report = run_roundtrip(cfg)
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    try:
        snr_list = [float(v) for v in args.snr.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --snr list: {exc}") from exc
    rows = sweep_snr(cfg, snr_list)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.json", "w") as fh:
        json.dump(rows, fh, indent=2)
        fh.write("\n")
    print(json.dumps(rows, indent=2))
    return EXIT_OK


def _cmd_vectors(args: argparse.Namespace) -> int:
    secret = Secret.from_hex(args.secret_hex)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_keystream_vectors(secret, args.count, out / "keystream_vectors.txt")
    write_cipher_vectors(secret, args.count, out / "cipher_vectors.txt")
    print(f"wrote {out / 'keystream_vectors.txt'} and {out / 'cipher_vectors.txt'}")
    return EXIT_OK


def _cmd_plot(args: argparse.Namespace) -> int:
    emit_scatter(args.csv, args.svg)
    print(f"wrote {args.svg}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qepsd",
        description="Phase-space stream-cipher simulator over a coherent "
        "optical baseband link",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the configured scenarios")
    p_run.add_argument("config", help="JSON config file")
    p_run.set_defaults(func=_cmd_run)

    p_rt = sub.add_parser("roundtrip", help="run the round-trip key-distribution mode")
    p_rt.add_argument("config", help="JSON config file")
    p_rt.set_defaults(func=_cmd_roundtrip)

    p_sweep = sub.add_parser("sweep", help="sweep snr_db over a list of values")
    p_sweep.add_argument("config", help="JSON config file")
    p_sweep.add_argument("--snr", required=True, help="comma-separated dB values")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_vec = sub.add_parser("vectors", help="emit keystream and cipher test vectors")
    p_vec.add_argument(
        "--secret-hex", default="00112233445566778899aabbccddeeff",
        help="secret as a hex string",
    )
    p_vec.add_argument("--count", type=int, default=DEFAULT_VECTOR_COUNT)
    p_vec.add_argument("--output-dir", default=os.environ.get("QEPSD_OUTPUT_DIR", "out"))
    p_vec.set_defaults(func=_cmd_vectors)

    p_plot = sub.add_parser("plot", help="render a constellation CSV as SVG")
    p_plot.add_argument("csv")
    p_plot.add_argument("svg")
    p_plot.set_defaults(func=_cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
