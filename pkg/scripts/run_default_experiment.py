#!/usr/bin/env python3
"""Run the default single-polarization experiment and write all artifacts.

Produces constellations.csv, summary.json, a scatter plot, and the
keystream/cipher test-vector files under the chosen output directory.
"""

import argparse
import dataclasses
import pathlib

from qepsd.harness import (
    DEFAULT_VECTOR_COUNT,
    ExperimentConfig,
    emit_scatter,
    run_experiment,
    write_cipher_vectors,
    write_keystream_vectors,
)
from qepsd.keystream import Secret


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output-dir", default="out", help="artifact directory")
    parser.add_argument("--snr", type=float, default=20.0, help="link SNR in dB")
    parser.add_argument(
        "--polarizations", type=int, default=1, choices=(1, 2)
    )
    args = parser.parse_args()

    cfg = ExperimentConfig(
        output_dir=args.output_dir, polarizations=args.polarizations
    )
    cfg.link = dataclasses.replace(cfg.link, snr_db=args.snr)

    report = run_experiment(cfg)
    out = pathlib.Path(args.output_dir)
    emit_scatter(out / "constellations.csv", out / "constellations.svg")

    secret = Secret.from_hex(cfg.secret_hex)
    write_keystream_vectors(secret, DEFAULT_VECTOR_COUNT, out / "keystream_vectors.txt")
    write_cipher_vectors(secret, DEFAULT_VECTOR_COUNT, out / "cipher_vectors.txt")

    for name, rep in report.scenarios.items():
        print(f"{name:12s} ber={rep.ber:.6g}  evm={rep.evm_rms:.4f}")
    print(f"throughput: {report.throughput_gbps} Gbps")
    print(f"artifacts in {out.resolve()}")


if __name__ == "__main__":
    main()
