#!/usr/bin/env python3
"""Sweep the link SNR and plot legitimate-vs-attacker BER waterfalls."""

import argparse
import csv
import pathlib

from qepsd.harness import ExperimentConfig, sweep_snr


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--snr",
        default="6,8,10,12,14,16,18,20,22,24",
        help="comma-separated SNR points in dB",
    )
    parser.add_argument("--output-dir", default="out")
    args = parser.parse_args()

    snrs = [float(s) for s in args.snr.split(",")]
    cfg = ExperimentConfig(
        output_dir=args.output_dir, scenarios=("legitimate", "attacker")
    )
    rows = sweep_snr(cfg, snrs)

    out = pathlib.Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "snr_sweep.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["snr_db", "legitimate_ber", "attacker_ber"])
        for row in rows:
            writer.writerow(
                [row["snr_db"], row["legit_ber"], row["attacker_ber"]]
            )
        print(f"{'snr_db':>8} {'legit_ber':>12} {'attacker_ber':>12}")
        for row in rows:
            print(
                f"{row['snr_db']:>8g} {row['legit_ber']:>12.3g} "
                f"{row['attacker_ber']:>12.3g}"
            )

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(
        snrs,
        [max(r["legit_ber"], 1e-7) for r in rows],
        "o-",
        label="keyed receiver",
    )
    ax.semilogy(snrs, [r["attacker_ber"] for r in rows], "s-", label="key-less DSP")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("BER (floor 1e-7 for display)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    svg = out / "snr_sweep.svg"
    fig.savefig(svg)
    print(f"wrote {csv_path} and {svg}")


if __name__ == "__main__":
    main()
