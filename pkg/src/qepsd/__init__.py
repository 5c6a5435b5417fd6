"""Phase-space stream-cipher simulator over a coherent optical baseband link.

Encrypts QPSK symbol streams with keystream-driven phase-space displacements
(a QPSK offset plus a quantized rotation per symbol), runs them through a
modeled fiber link (dispersion, laser phase noise, amplifier noise), and
compares a keyed receiver against a full-DSP key-less attacker.
"""

from .harness import (
    ConfigError,
    ExperimentConfig,
    ExperimentReport,
    emit_scatter,
    run_experiment,
    run_roundtrip,
    sweep_snr,
)
from .keystream import KeystreamState, Secret, SymbolKey, seed_from_secret
from .link import BerReport, LinkConfig
from .modem import SymbolStream, spec_16qam, spec_8psk, spec_qpsk

__version__ = "0.1.0"

__all__ = [
    "BerReport",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentReport",
    "KeystreamState",
    "LinkConfig",
    "Secret",
    "SymbolKey",
    "SymbolStream",
    "emit_scatter",
    "run_experiment",
    "run_roundtrip",
    "seed_from_secret",
    "spec_16qam",
    "spec_8psk",
    "spec_qpsk",
    "sweep_snr",
]
