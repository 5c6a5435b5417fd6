"""Experiment orchestration: scenarios, sweeps, round-trip mode, reports.

A single JSON config drives everything.  One run generates the data bits,
encrypts them, materializes one channel realization, and feeds the identical
received block to every requested receiver scenario, so legitimate and
attacker results are a paired comparison.  Outputs are static files: a JSON
summary, a constellation CSV (stage,index,i,q) and optional SVG scatter
plots; every figure is regenerable from its own output directory.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import link as link_mod
from . import qeps
from .keystream import (
    MAX_SECRET_BYTES,
    KeystreamState,
    Secret,
    next_symbol_key,
    seed_from_secret,
    splitmix64_words,
)
from .link import (
    PILOT_LENGTH,
    BerReport,
    LinkConfig,
    attacker_dsp,
    compensate_cd,
    compute_ber,
    compute_evm,
    estimate_phase_vv,
    rescale_to_reference,
)
from .modem import SymbolStream, demodulate, modulate, spec_by_name

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentReport",
    "run_experiment",
    "run_roundtrip",
    "sweep_snr",
    "emit_scatter",
    "write_keystream_vectors",
    "write_cipher_vectors",
]

SCENARIO_NAMES = ("noiseless", "legitimate", "attacker", "roundtrip")

CSV_STAGES = ("tx_plain", "tx_cipher", "rx_raw", "rx_dsp_attacker", "rx_decrypted")


class ConfigError(ValueError):
    """Invalid experiment config; the message lists every violated field."""


@dataclass
class ExperimentConfig:
    link: LinkConfig = field(default_factory=LinkConfig)
    modulation: str = "qpsk"
    secret_hex: str = "00112233445566778899aabbccddeeff"
    data_seed: int = 0xDA7A_5EED_0000_0001
    sequence_bits: int = 65536
    polarizations: int = 1
    scenarios: tuple[str, ...] = ("noiseless", "legitimate", "attacker")
    pm_block_length: int = 1
    output_dir: str = "out"

    def validate(self) -> None:
        problems = []
        try:
            spec = spec_by_name(self.modulation)
        except ValueError as exc:
            problems.append(f"modulation: {exc}")
            spec = None
        if spec is not None and self.sequence_bits % spec.bits_per_symbol != 0:
            problems.append(
                f"sequence_bits: {self.sequence_bits} not divisible by "
                f"{spec.bits_per_symbol} bits/symbol"
            )
        if self.sequence_bits <= 0:
            problems.append("sequence_bits: must be positive")
        if self.polarizations not in (1, 2):
            problems.append(f"polarizations: must be 1 or 2, got {self.polarizations}")
        for name in self.scenarios:
            if name not in SCENARIO_NAMES:
                problems.append(f"scenarios: unknown scenario {name!r}")
        try:
            secret = bytes.fromhex(self.secret_hex)
            if not 1 <= len(secret) <= MAX_SECRET_BYTES:
                problems.append(
                    f"secret_hex: secret length {len(secret)} outside "
                    f"[1, {MAX_SECRET_BYTES}] bytes"
                )
        except ValueError:
            problems.append("secret_hex: not a valid hex string")
        if self.pm_block_length < 1:
            problems.append("pm_block_length: must be >= 1")
        if problems:
            raise ConfigError("invalid config:\n  " + "\n  ".join(problems))

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        link_raw = raw.pop("link", {})
        try:
            link = LinkConfig(**link_raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config:\n  link: {exc}") from exc
        known = {f.name for f in dataclasses.fields(cls)} - {"link"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(
                "invalid config:\n  unknown fields: " + ", ".join(sorted(unknown))
            )
        if "scenarios" in raw:
            raw["scenarios"] = tuple(raw["scenarios"])
        cfg = cls(link=link, **raw)
        cfg.validate()
        return cfg

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["scenarios"] = list(self.scenarios)
        return out

    def lane_secret(self, lane: int) -> Secret:
        # Dual polarization lanes are domain separated by a trailing tag byte.
        return Secret(bytes.fromhex(self.secret_hex) + bytes([lane]))

    def lane_link(self, lane: int) -> LinkConfig:
        cfg = dataclasses.replace(self.link)
        cfg.noise_seed = (self.link.noise_seed + lane) & ((1 << 64) - 1)
        return cfg


@dataclass
class ExperimentReport:
    scenarios: dict[str, BerReport]
    throughput_gbps: float
    config: dict
    constellation_csv: str | None = None
    summary_path: str | None = None
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "throughput_gbps": self.throughput_gbps,
            "scenarios": {k: v.as_dict() for k, v in self.scenarios.items()},
            "config": self.config,
        }
        if self.constellation_csv:
            out["constellation_csv"] = self.constellation_csv
        out.update(self.extras)
        return out


def _data_bits(seed: int, count: int) -> np.ndarray:
    """Deterministic data bits: unpacked SplitMix64 words, MSB first."""
    nwords = (count + 63) // 64
    words = splitmix64_words(seed, nwords)
    bits = np.unpackbits(words.view(np.uint8).reshape(-1, 8)[:, ::-1], axis=1)
    return bits.reshape(-1)[:count].astype(np.int64)


def throughput_gbps(cfg: ExperimentConfig) -> float:
    spec = spec_by_name(cfg.modulation)
    return spec.bits_per_symbol * cfg.link.baud * cfg.polarizations / 1e9


def _legitimate_receive(
    rx_raw: SymbolStream,
    lane_cfg: LinkConfig,
    rx_state: KeystreamState,
    plain_symbols: np.ndarray,
    cfg: ExperimentConfig,
    spec,
) -> SymbolStream:
    """Keyed receiver chain: CD compensation, renormalization, keyed rotation
    removal, ring-aware carrier phase estimation, keyed offset removal.

    The keyed rotation must come off before carrier recovery (the rotated
    cipher has no usable fourth-power statistic), while the keyed offset can
    only come off after it (subtracting the offset does not commute with the
    channel phase walk)."""
    n = rx_raw.symbols.size
    y = compensate_cd(rx_raw, lane_cfg)
    y = rescale_to_reference(y, lane_cfg, spec.average_energy())
    alpha1, theta = qeps.step_arrays(rx_state, n, pm_block_length=cfg.pm_block_length)
    derotated = SymbolStream(y.symbols * np.exp(-1j * theta), y.baud)
    pilots = plain_symbols[:PILOT_LENGTH] + alpha1[:PILOT_LENGTH]
    tracked = estimate_phase_vv(
        derotated, pilots, ring_weights=link_mod.cipher_ring_weights
    )
    return SymbolStream(tracked.symbols - alpha1, y.baud)


def run_experiment(cfg: ExperimentConfig, write_outputs: bool = True) -> ExperimentReport:
    """Run every requested scenario once, with a shared channel realization."""
    cfg.validate()
    spec = spec_by_name(cfg.modulation)
    reports: dict[str, BerReport] = {}
    dumps: dict[str, np.ndarray] = {}
    scenarios = [s for s in cfg.scenarios if s != "roundtrip"]

    for lane in range(cfg.polarizations):
        lane_cfg = cfg.lane_link(lane)
        bits = _data_bits(cfg.data_seed + lane, cfg.sequence_bits)
        plain = modulate(bits, spec, baud=lane_cfg.baud)
        tx_state = seed_from_secret(cfg.lane_secret(lane))
        cipher = qeps.encrypt_stream(
            plain, tx_state, pm_block_length=cfg.pm_block_length
        )
        cipher_stream = SymbolStream(cipher.symbols, lane_cfg.baud)
        needs_channel = any(s in ("legitimate", "attacker") for s in scenarios)
        rx_raw = None
        if needs_channel:
            rx_raw = link_mod.apply_channel(
                cipher_stream, lane_cfg, ref_energy=spec.average_energy()
            )
        if lane == 0:
            dumps["tx_plain"] = plain.symbols
            dumps["tx_cipher"] = cipher.symbols
            if rx_raw is not None:
                dumps["rx_raw"] = rx_raw.symbols

        for name in scenarios:
            if name == "noiseless":
                state = seed_from_secret(cfg.lane_secret(lane))
                decrypted = qeps.decrypt_stream(
                    cipher, state, pm_block_length=cfg.pm_block_length
                )
                rx_bits = demodulate(decrypted, spec)
                rep = compute_ber(
                    bits,
                    rx_bits,
                    evm_rms=compute_evm(decrypted, spec),
                    scenario="noiseless",
                )
            elif name == "legitimate":
                state = seed_from_secret(cfg.lane_secret(lane))
                recovered = _legitimate_receive(
                    rx_raw, lane_cfg, state, plain.symbols, cfg, spec
                )
                rx_bits = demodulate(recovered, spec)
                rep = compute_ber(
                    bits,
                    rx_bits,
                    evm_rms=compute_evm(recovered, spec),
                    scenario="legitimate",
                )
                if lane == 0:
                    dumps["rx_decrypted"] = recovered.symbols
            elif name == "attacker":
                pilots = plain.symbols[:PILOT_LENGTH]
                rep = link_mod.attacker_receive(
                    rx_raw, lane_cfg, bits, spec, pilots
                )
                if lane == 0:
                    dumps["rx_dsp_attacker"] = attacker_dsp(
                        rx_raw, lane_cfg, spec, pilots
                    ).symbols
            else:  # pragma: no cover - filtered above
                continue
            if name in reports:
                prev = reports[name]
                reports[name] = BerReport(
                    bit_errors=prev.bit_errors + rep.bit_errors,
                    total_bits=prev.total_bits + rep.total_bits,
                    evm_rms=(prev.evm_rms + rep.evm_rms) / 2.0,
                    scenario=name,
                )
            else:
                reports[name] = rep

    report = ExperimentReport(
        scenarios=reports,
        throughput_gbps=throughput_gbps(cfg),
        config=cfg.to_dict(),
    )
    if write_outputs:
        _write_outputs(cfg, report, dumps)
    return report


def run_roundtrip(cfg: ExperimentConfig) -> ExperimentReport:
    """Reflective key-distribution mode, simulated at symbol level.

    One party (holding a self-shared secret) emits its keyed net-displacement
    stream; the partner adds data-modulated symbols on the return pass; the
    originator subtracts the net displacements to read the partner's data.
    An eavesdropper applying the full key-less DSP chain to the return pass
    is scored as well.
    """
    cfg.validate()
    spec = spec_by_name(cfg.modulation)
    reports: dict[str, BerReport] = {}
    extras: dict = {}
    for lane in range(cfg.polarizations):
        bits = _data_bits(cfg.data_seed + lane, cfg.sequence_bits)
        data = modulate(bits, spec, baud=cfg.link.baud)
        n = data.symbols.size
        alice_tx = seed_from_secret(cfg.lane_secret(lane))
        outbound = qeps.net_displacement_stream(
            alice_tx, n, pm_block_length=cfg.pm_block_length
        )
        returned = outbound + data.symbols
        alice_rx = seed_from_secret(cfg.lane_secret(lane))
        recovered = returned - qeps.net_displacement_stream(
            alice_rx, n, pm_block_length=cfg.pm_block_length
        )
        rec_stream = SymbolStream(recovered, cfg.link.baud)
        rx_bits = demodulate(rec_stream, spec)
        rep = compute_ber(
            bits, rx_bits, evm_rms=compute_evm(rec_stream, spec), scenario="roundtrip"
        )
        eve = estimate_phase_vv(
            SymbolStream(returned, cfg.link.baud), data.symbols[:PILOT_LENGTH]
        )
        eve_rep = compute_ber(
            bits, demodulate(eve, spec), evm_rms=compute_evm(eve, spec),
            scenario="eavesdropper",
        )
        for name, r in (("roundtrip", rep), ("eavesdropper", eve_rep)):
            if name in reports:
                prev = reports[name]
                reports[name] = BerReport(
                    prev.bit_errors + r.bit_errors,
                    prev.total_bits + r.total_bits,
                    (prev.evm_rms + r.evm_rms) / 2.0,
                    name,
                )
            else:
                reports[name] = r
    extras["key_rate_gbps"] = throughput_gbps(cfg)
    return ExperimentReport(
        scenarios=reports,
        throughput_gbps=throughput_gbps(cfg),
        config=cfg.to_dict(),
        extras=extras,
    )


def sweep_snr(cfg: ExperimentConfig, snr_list: list[float]) -> list[dict]:
    """One full (legitimate + attacker) experiment per SNR, shared data/keys."""
    if not snr_list:
        raise ValueError("snr_list must be non-empty")
    rows = []
    for snr in snr_list:
        point = dataclasses.replace(cfg)
        point.link = dataclasses.replace(cfg.link, snr_db=float(snr))
        point.scenarios = ("legitimate", "attacker")
        rep = run_experiment(point, write_outputs=False)
        rows.append(
            {
                "snr_db": float(snr),
                "legit_ber": rep.scenarios["legitimate"].ber,
                "attacker_ber": rep.scenarios["attacker"].ber,
                "evm": rep.scenarios["legitimate"].evm_rms,
            }
        )
    return rows


def _write_outputs(cfg: ExperimentConfig, report: ExperimentReport, dumps: dict) -> None:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "constellations.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stage", "index", "i", "q"])
        for stage in CSV_STAGES:
            if stage not in dumps:
                continue
            for idx, z in enumerate(dumps[stage]):
                writer.writerow([stage, idx, f"{z.real:.17g}", f"{z.imag:.17g}"])
    report.constellation_csv = str(csv_path)
    summary_path = out / "summary.json"
    with open(summary_path, "w") as fh:
        json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    report.summary_path = str(summary_path)


def emit_scatter(csv_path: str | Path, svg_path: str | Path) -> None:
    """Render a constellation CSV as a square, equal-aspect SVG scatter."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    stages: dict[str, list[tuple[float, float]]] = {}
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is not None and header[:4] != ["stage", "index", "i", "q"]:
            raise ValueError(f"unexpected CSV header {header!r} in {csv_path}")
        for row in reader:
            if len(row) < 4:
                raise ValueError(f"malformed CSV row {row!r} in {csv_path}")
            stages.setdefault(row[0], []).append((float(row[2]), float(row[3])))

    fig, ax = plt.subplots(figsize=(6, 6))
    for stage, pts in stages.items():
        arr = np.asarray(pts)
        ax.scatter(arr[:, 0], arr[:, 1], s=2, alpha=0.5, label=stage)
    ax.set_xlabel("in-phase")
    ax.set_ylabel("quadrature")
    ax.set_aspect("equal", adjustable="box")
    if stages:
        lim = 1.1 * max(
            abs(v) for pts in stages.values() for xy in pts for v in xy
        ) or 1.0
        ax.set_xlim(-lim, lim)
        ax.set_ylim(-lim, lim)
        ax.legend(loc="upper right", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.savefig(svg_path, format="svg")
    plt.close(fig)


DEFAULT_VECTOR_COUNT = 256


def write_keystream_vectors(secret: Secret, count: int, path: str | Path) -> None:
    """Plain-text (counter, alpha1_index, theta_index) triples for interop."""
    state = seed_from_secret(secret)
    with open(path, "w") as fh:
        fh.write(f"# keystream vectors, secret_hex={secret.data.hex()}\n")
        fh.write("# counter alpha1_index theta_index\n")
        for _ in range(count):
            counter = state.counter
            key = next_symbol_key(state)
            fh.write(f"{counter} {key.alpha1_index} {key.theta_index}\n")


def write_cipher_vectors(
    secret: Secret, count: int, path: str | Path, data_seed: int = 0xDA7A_5EED_0000_0001
) -> None:
    """Plain-text (counter, beta_i, beta_q, gamma_i, gamma_q) lines.

    Plaintext symbols are QPSK-modulated bits from the stated data seed, so
    an independent implementation can reproduce the file byte for byte.
    """
    spec = spec_by_name("qpsk")
    bits = _data_bits(data_seed, count * spec.bits_per_symbol)
    plain = modulate(bits, spec)
    state = seed_from_secret(secret)
    cipher = qeps.encrypt_stream(plain, state)
    with open(path, "w") as fh:
        fh.write(
            f"# cipher vectors, secret_hex={secret.data.hex()}"
            f" data_seed={data_seed}\n"
        )
        fh.write("# counter beta_i beta_q gamma_i gamma_q\n")
        for k in range(count):
            b = plain.symbols[k]
            g = cipher.symbols[k]
            fh.write(
                f"{k} {b.real:.17g} {b.imag:.17g} {g.real:.17g} {g.imag:.17g}\n"
            )
