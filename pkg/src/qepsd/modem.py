"""Constellations and bit/symbol mapping: QPSK, 8-PSK, 16-QAM, Gray coded.

Constellation coordinates are kept at their raw integer levels (QPSK at
+/-1 +/- j, 16-QAM on the +/-1, +/-3 grid); normalization to transmit power
is the link model's job.  Decisions are minimum Euclidean distance with a
deterministic lowest-index tie-break so independent runs agree bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConstellationSpec",
    "SymbolStream",
    "spec_qpsk",
    "spec_8psk",
    "spec_16qam",
    "spec_by_name",
    "modulate",
    "demodulate",
]


@dataclass(frozen=True)
class ConstellationSpec:
    """An ordered constellation with Gray-coded bit labels.

    labels[k] is the integer whose bits_per_symbol-wide binary expansion is
    the bit pattern of points[k].
    """

    name: str
    points: tuple[complex, ...]
    bits_per_symbol: int
    labels: tuple[int, ...]

    def label_to_index(self) -> np.ndarray:
        inv = np.empty(len(self.points), dtype=np.int64)
        for idx, lab in enumerate(self.labels):
            inv[lab] = idx
        return inv

    def average_energy(self) -> float:
        return float(np.mean(np.abs(np.asarray(self.points)) ** 2))


@dataclass
class SymbolStream:
    """A finite block of complex symbols at a given symbol rate."""

    symbols: np.ndarray
    baud: float = 28e9

    def __post_init__(self) -> None:
        self.symbols = np.asarray(self.symbols, dtype=np.complex128)
        if self.symbols.size and not np.all(np.isfinite(self.symbols)):
            raise ValueError("symbol stream contains non-finite values")


def spec_qpsk() -> ConstellationSpec:
    """QPSK at raw +/-1 levels, Gray labels 00/01/11/10 around the circle."""
    return ConstellationSpec(
        name="qpsk",
        points=(1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j),
        bits_per_symbol=2,
        labels=(0b00, 0b01, 0b11, 0b10),
    )


def spec_8psk() -> ConstellationSpec:
    """8-PSK on the QPSK-amplitude circle, cyclic 3-bit Gray labels."""
    radius = np.sqrt(2.0)
    pts = tuple(radius * np.exp(1j * 2 * np.pi * k / 8) for k in range(8))
    return ConstellationSpec(
        name="8psk",
        points=pts,
        bits_per_symbol=3,
        labels=(0b000, 0b001, 0b011, 0b010, 0b110, 0b111, 0b101, 0b100),
    )


# Per-axis Gray map for 16-QAM: 2-bit code -> level.
_QAM_AXIS_LEVELS = {0b00: -3, 0b01: -1, 0b11: 1, 0b10: 3}


def spec_16qam() -> ConstellationSpec:
    """16-QAM on the +/-1, +/-3 grid, per-axis Gray, label = I bits then Q bits."""
    points = []
    labels = []
    idx = 0
    for i_code, i_level in _QAM_AXIS_LEVELS.items():
        for q_code, q_level in _QAM_AXIS_LEVELS.items():
            points.append(complex(i_level, q_level))
            labels.append((i_code << 2) | q_code)
            idx += 1
    return ConstellationSpec(
        name="16qam",
        points=tuple(points),
        bits_per_symbol=4,
        labels=tuple(labels),
    )


_SPECS = {"qpsk": spec_qpsk, "8psk": spec_8psk, "16qam": spec_16qam}


def spec_by_name(name: str) -> ConstellationSpec:
    try:
        return _SPECS[name]()
    except KeyError:
        raise ValueError(f"unknown constellation {name!r}") from None


def modulate(bits: np.ndarray, spec: ConstellationSpec, baud: float = 28e9) -> SymbolStream:
    """Map consecutive bit groups to constellation points, MSB first."""
    bits = np.asarray(bits, dtype=np.int64)
    k = spec.bits_per_symbol
    if bits.size % k != 0:
        raise ValueError(
            f"bit count {bits.size} not divisible by {k} bits/symbol"
        )
    groups = bits.reshape(-1, k)
    weights = 1 << np.arange(k - 1, -1, -1)
    label_values = groups @ weights
    indices = spec.label_to_index()[label_values]
    points = np.asarray(spec.points)
    return SymbolStream(points[indices], baud=baud)


def demodulate(stream: SymbolStream, spec: ConstellationSpec) -> np.ndarray:
    """Nearest-point decision, then the point's bit label, MSB first.

    Exact ties go to the lowest point index (argmin keeps the first hit).
    """
    points = np.asarray(spec.points)
    d2 = np.abs(stream.symbols[:, None] - points[None, :]) ** 2
    indices = np.argmin(d2, axis=1)
    label_values = np.asarray(spec.labels)[indices]
    k = spec.bits_per_symbol
    shifts = np.arange(k - 1, -1, -1)
    return ((label_values[:, None] >> shifts) & 1).astype(np.int64).reshape(-1)
