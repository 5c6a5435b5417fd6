"""Discrete-time baseband model of the fiber link and receiver DSP.

One sample per symbol, no pulse shaping.  The transmit block is normalized,
attenuated, dispersed by an all-pass quadratic-phase filter, walked through
Wiener laser phase noise, amplified, and hit with additive white Gaussian
noise.  The receiver side provides genie-aided dispersion compensation,
amplitude renormalization, fourth-power block carrier phase estimation with
pilot-based quadrant resolution, and BER/EVM metrics.

All randomness comes from an explicitly seeded SplitMix64 engine so that
every scenario sharing a seed sees the identical channel realization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .keystream import splitmix64_words
from .modem import ConstellationSpec, SymbolStream, demodulate

__all__ = [
    "SPEED_OF_LIGHT",
    "LinkConfig",
    "BerReport",
    "apply_channel",
    "compensate_cd",
    "rescale_to_reference",
    "cipher_ring_weights",
    "estimate_phase_vv",
    "phase_noise_sigma",
    "compute_ber",
    "compute_evm",
    "attacker_receive",
]

SPEED_OF_LIGHT = 299792458.0  # m/s

PILOT_LENGTH = 32


@dataclass
class LinkConfig:
    """Physical link parameters (Table-1-style units: km, dB/km, ps/nm/km)."""

    baud: float = 28e9
    fiber_length: float = 80.0
    attenuation: float = 0.2
    dispersion: float = 16.75
    dispersion_slope: float = 0.075  # stored only; single wavelength
    wavelength: float = 1550.0
    tx_linewidth: float = 1e5
    lo_linewidth: float = 1e5
    amplifier_gain: float | None = None  # dB; None -> cancel the span loss
    snr_db: float = 20.0  # Es/N0 after amplification; +inf disables noise
    noise_seed: int = 0x5EED_CAFE_F00D_0001

    def __post_init__(self) -> None:
        if self.amplifier_gain is None:
            self.amplifier_gain = self.attenuation * self.fiber_length
        errors = []
        for name in ("baud", "fiber_length", "wavelength"):
            if getattr(self, name) <= 0:
                errors.append(f"{name} must be > 0")
        for name in ("attenuation", "dispersion", "tx_linewidth", "lo_linewidth"):
            if getattr(self, name) < 0:
                errors.append(f"{name} must be >= 0")
        if math.isnan(self.snr_db):
            errors.append("snr_db must not be NaN")
        if errors:
            raise ValueError("; ".join(errors))

    def attenuation_linear(self) -> float:
        return 10.0 ** (-self.attenuation * self.fiber_length / 20.0)

    def gain_linear(self) -> float:
        return 10.0 ** (self.amplifier_gain / 20.0)


@dataclass
class BerReport:
    """Bit-error accounting for one receiver scenario."""

    bit_errors: int
    total_bits: int
    evm_rms: float = 0.0
    scenario: str = ""

    @property
    def ber(self) -> float:
        return self.bit_errors / self.total_bits if self.total_bits else 0.0

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "bit_errors": self.bit_errors,
            "total_bits": self.total_bits,
            "ber": self.ber,
            "evm_rms": self.evm_rms,
        }


def _cd_response(n: int, cfg: LinkConfig) -> np.ndarray:
    """All-pass dispersion response at 1 sample/symbol, f in (-baud/2, baud/2]."""
    f = np.fft.fftfreq(n, d=1.0 / cfg.baud)
    lam = cfg.wavelength * 1e-9  # nm -> m
    d_si = cfg.dispersion * 1e-6  # ps/nm/km -> s/m^2
    length = cfg.fiber_length * 1e3  # km -> m
    phase = np.pi * lam**2 * d_si * length * f**2 / SPEED_OF_LIGHT
    return np.exp(1j * phase)


def _apply_cd(x: np.ndarray, cfg: LinkConfig, conjugate: bool = False) -> np.ndarray:
    if x.size == 0:
        return x
    h = _cd_response(x.size, cfg)
    if conjugate:
        h = np.conj(h)
    return np.fft.ifft(np.fft.fft(x) * h)


def _normals(seed: int, count: int) -> np.ndarray:
    """`count` standard normals via Box-Muller over SplitMix64 uniforms."""
    pairs = (count + 1) // 2
    words = splitmix64_words(seed, 2 * pairs)
    # (0, 1] uniforms from the top 53 bits; +1 keeps log() finite.
    u1 = ((words[:pairs] >> np.uint64(11)).astype(np.float64) + 1.0) / 2.0**53
    u2 = (words[pairs:] >> np.uint64(11)).astype(np.float64) / 2.0**53
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
    return z[:count]


def _stage_seeds(noise_seed: int, count: int = 3) -> np.ndarray:
    """Independent per-stage seeds derived from the configured noise seed."""
    return splitmix64_words(noise_seed, count)


def phase_noise_sigma(cfg: LinkConfig) -> float:
    """Per-symbol std of the Wiener phase increment for combined linewidth."""
    return math.sqrt(2.0 * math.pi * (cfg.tx_linewidth + cfg.lo_linewidth) / cfg.baud)


def apply_channel(
    tx: SymbolStream,
    cfg: LinkConfig,
    ref_energy: float | None = None,
) -> SymbolStream:
    """Run a transmit block through the baseband fiber + amplifier model.

    Stages, in order: normalize to unit average symbol energy (relative to
    ref_energy when given, else the block's own mean energy), span
    attenuation, chromatic dispersion, laser phase noise, amplifier gain,
    additive Gaussian noise at the configured Es/N0.  snr_db = +inf disables
    the additive noise stage.
    """
    x = np.array(tx.symbols, dtype=np.complex128)
    n = x.size
    if n == 0:
        return SymbolStream(x, tx.baud)
    e_ref = float(np.mean(np.abs(x) ** 2)) if ref_energy is None else float(ref_energy)
    if e_ref <= 0:
        raise ValueError("reference energy must be positive")
    x = x / math.sqrt(e_ref)
    x = x * cfg.attenuation_linear()
    x = _apply_cd(x, cfg)
    seeds = _stage_seeds(cfg.noise_seed)
    sigma = phase_noise_sigma(cfg)
    if sigma > 0:
        walk = sigma * np.cumsum(_normals(int(seeds[0]), n))
        x = x * np.exp(1j * walk)
    x = x * cfg.gain_linear()
    if math.isfinite(cfg.snr_db):
        # Post-gain energy of a unit-normalized block (dispersion and phase
        # noise are energy preserving, so this equals the block's actual
        # post-gain average energy when ref_energy is the block's own).
        es = (cfg.attenuation_linear() * cfg.gain_linear()) ** 2
        var = es / (2.0 * 10.0 ** (cfg.snr_db / 10.0))
        noise = math.sqrt(var) * (
            _normals(int(seeds[1]), n) + 1j * _normals(int(seeds[2]), n)
        )
        x = x + noise
    return SymbolStream(x, tx.baud)


def compensate_cd(rx: SymbolStream, cfg: LinkConfig) -> SymbolStream:
    """Genie-aided dispersion compensation: the exact conjugate filter."""
    return SymbolStream(_apply_cd(rx.symbols, cfg, conjugate=True), rx.baud)


def rescale_to_reference(rx: SymbolStream, cfg: LinkConfig, ref_energy: float) -> SymbolStream:
    """Undo the channel's known net scaling, restoring constellation units."""
    scale = math.sqrt(ref_energy) / (cfg.attenuation_linear() * cfg.gain_linear())
    return SymbolStream(rx.symbols * scale, rx.baud)


def cipher_ring_weights(amplitudes: np.ndarray) -> np.ndarray:
    """Fourth-power alignment weights for the keyed-rotation-removed cipher.

    That signal lives on three rings: amplitude 0 (no phase information),
    amplitude 2 at angles k*pi/2 (fourth power along +1) and amplitude
    2*sqrt(2) at angles pi/4 + k*pi/2 (fourth power along -1).  Weighting the
    middle ring by -1 aligns every contribution along the same direction, so
    block sums cannot cancel the way an unweighted mix of the two rings can.
    """
    w = np.where(amplitudes < 1.0, 0.0, 1.0)
    return np.where((amplitudes >= 1.0) & (amplitudes < 1.0 + np.sqrt(2.0)), -w, w)


def estimate_phase_vv(
    rx: SymbolStream,
    pilots: np.ndarray,
    block: int = 64,
    ring_weights=None,
) -> SymbolStream:
    """Fourth-power block carrier phase estimation for 4-fold-symmetric signals.

    Per block the estimate is arg(sum s^4)/4 - pi/4 (the -pi/4 removes the
    QPSK alphabet's own fourth-power angle, so a clean unrotated block maps
    to zero).  Estimates are unwrapped across blocks to the nearest pi/2
    branch of the previous block, and the residual global quadrant ambiguity
    is resolved against known pilot symbols at the stream head.

    ring_weights, when given, maps symbol amplitudes to per-symbol weights on
    the fourth-power sum; see cipher_ring_weights for the multi-ring case.
    """
    if block < 1:
        raise ValueError("block must be >= 1")
    pilots = np.asarray(pilots, dtype=np.complex128)
    x = rx.symbols
    if x.size < pilots.size:
        raise ValueError(
            f"stream of {x.size} symbols shorter than {pilots.size} pilots"
        )
    n = x.size
    nblocks = (n + block - 1) // block
    s4 = x**4
    if ring_weights is not None:
        s4 = s4 * ring_weights(np.abs(x))
    estimates = np.zeros(nblocks)
    prev = 0.0
    have_prev = False
    for b in range(nblocks):
        total = np.sum(s4[b * block : (b + 1) * block])
        if total == 0:
            est = prev if have_prev else 0.0
        else:
            est = np.angle(total) / 4.0 - np.pi / 4.0
            if have_prev:
                # Shift by multiples of pi/2 onto the previous block's branch.
                est += round((prev - est) / (np.pi / 2)) * (np.pi / 2)
        estimates[b] = est
        prev = est
        have_prev = True
    correction = np.exp(-1j * np.repeat(estimates, block)[:n])
    y = x * correction
    # Quadrant ambiguity: pick the pi/2 multiple best matching the pilots.
    head = y[: pilots.size]
    rotations = (-1j) ** np.arange(4)
    costs = [np.sum(np.abs(head * r - pilots) ** 2) for r in rotations]
    return SymbolStream(y * rotations[int(np.argmin(costs))], rx.baud)


def compute_ber(
    tx_bits: np.ndarray,
    rx_bits: np.ndarray,
    evm_rms: float = 0.0,
    scenario: str = "",
) -> BerReport:
    """Count positional bit mismatches between equal-length streams."""
    tx_bits = np.asarray(tx_bits)
    rx_bits = np.asarray(rx_bits)
    if tx_bits.size != rx_bits.size:
        raise ValueError(
            f"bit stream lengths differ: {tx_bits.size} vs {rx_bits.size}"
        )
    errors = int(np.count_nonzero(tx_bits != rx_bits))
    return BerReport(
        bit_errors=errors,
        total_bits=int(tx_bits.size),
        evm_rms=evm_rms,
        scenario=scenario,
    )


def compute_evm(rx: SymbolStream, spec: ConstellationSpec) -> float:
    """RMS distance to the nearest reference point over RMS reference amplitude.

    Expects rx already scaled to the reference constellation's average energy.
    """
    points = np.asarray(spec.points)
    d2 = np.abs(rx.symbols[:, None] - points[None, :]) ** 2
    err = float(np.mean(np.min(d2, axis=1)))
    return math.sqrt(err / spec.average_energy())


def attacker_dsp(
    cipher_after_channel: SymbolStream,
    cfg: LinkConfig,
    spec: ConstellationSpec,
    pilots: np.ndarray,
    ref_energy: float | None = None,
) -> SymbolStream:
    """The key-less receiver's DSP chain: CD compensation, renormalization,
    carrier phase estimation.  No decryption stage exists without a secret."""
    e_ref = spec.average_energy() if ref_energy is None else ref_energy
    y = compensate_cd(cipher_after_channel, cfg)
    y = rescale_to_reference(y, cfg, e_ref)
    return estimate_phase_vv(y, pilots)


def attacker_receive(
    cipher_after_channel: SymbolStream,
    cfg: LinkConfig,
    tx_bits: np.ndarray,
    spec: ConstellationSpec,
    pilots: np.ndarray,
    ref_energy: float | None = None,
) -> BerReport:
    """Full key-less DSP receiver run directly on the ciphertext.

    The attacker knows every link parameter and the data modulation (and is
    even granted the pilot symbols) but holds no secret.  BER is scored
    against the true transmitted bits.
    """
    y = attacker_dsp(cipher_after_channel, cfg, spec, pilots, ref_energy)
    rx_bits = demodulate(y, spec)
    evm = compute_evm(y, spec)
    return compute_ber(tx_bits, rx_bits, evm_rms=evm, scenario="attacker")
