"""The phase-space stream cipher: per-symbol offset-plus-rotation.

Each data symbol beta is encrypted as gamma = (beta + alpha1) * exp(j*theta),
where alpha1 is a keystream-chosen QPSK point and theta a keystream-chosen
angle on a 1024-level grid.  The offset-then-rotate order keeps cancelled
symbols (beta = -alpha1) at the origin, producing the characteristic cipher
constellation: a central cluster at amplitude 0, a square band at amplitude 2
and corners at 2*sqrt(2).  Decryption inverts both operations with the
synchronized keystream; a round-trip mode removes the combined net
displacement in one step for reflective key distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .keystream import THETA_LEVELS, KeystreamState, SymbolKey, symbol_key_arrays
from .modem import SymbolStream, spec_qpsk

__all__ = [
    "EncryptionStep",
    "CipherStream",
    "DesynchronizationError",
    "step_from_key",
    "encrypt_symbol",
    "decrypt_symbol",
    "encrypt_stream",
    "decrypt_stream",
    "net_displacement",
    "roundtrip_recover",
    "step_arrays",
    "net_displacement_stream",
]

_QPSK_POINTS = np.asarray(spec_qpsk().points)


class DesynchronizationError(RuntimeError):
    """Keystream counter does not match the cipher stream's start counter."""


@dataclass(frozen=True)
class EncryptionStep:
    """One symbol's encryption material: QPSK offset and rotation angle."""

    alpha1: complex
    theta: float


@dataclass
class CipherStream:
    """Encrypted symbols plus the keystream counter of the first symbol."""

    symbols: np.ndarray
    start_counter: int
    baud: float = 28e9

    def __post_init__(self) -> None:
        self.symbols = np.asarray(self.symbols, dtype=np.complex128)


def step_from_key(key: SymbolKey, alpha1_scale: float = 1.0) -> EncryptionStep:
    """Bind keystream indices to a concrete offset point and angle.

    alpha1_scale rescales the offset alphabet relative to the data
    constellation (default: identical amplitudes).
    """
    alpha1 = alpha1_scale * complex(_QPSK_POINTS[key.alpha1_index])
    theta = 2.0 * math.pi * key.theta_index / THETA_LEVELS
    return EncryptionStep(alpha1=alpha1, theta=theta)


def encrypt_symbol(beta: complex, step: EncryptionStep) -> complex:
    """gamma = (beta + alpha1) * exp(j*theta)."""
    return (beta + step.alpha1) * complex(math.cos(step.theta), math.sin(step.theta))


def decrypt_symbol(gamma: complex, step: EncryptionStep) -> complex:
    """Exact inverse: rotate back by theta, then remove the offset."""
    return gamma * complex(math.cos(-step.theta), math.sin(-step.theta)) - step.alpha1


def net_displacement(step: EncryptionStep) -> complex:
    """The single displacement equivalent to the whole step: alpha1*e^{j*theta}.

    Equal to encrypt_symbol(0, step); removing it in one piece is what makes
    the round-trip (reverse-order) recovery work.
    """
    return encrypt_symbol(0j, step)


def roundtrip_recover(received: complex, step: EncryptionStep) -> complex:
    """Recover the partner's data symbol from a round-trip reception.

    The reception is net_displacement(step) + beta; subtracting the net
    displacement as one unit (rather than undoing rotation and offset in
    forward order) returns beta.
    """
    return received - net_displacement(step)


def _step_arrays(
    state: KeystreamState,
    count: int,
    alpha1_scale: float,
    pm_block_length: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-symbol (alpha1, theta) arrays, consuming `count` keystream words.

    With pm_block_length > 1 the rotation angle is held constant across each
    block of that many symbols (the offset stays per-symbol); key consumption
    is unchanged so transmitter and receiver stay aligned.
    """
    a_idx, t_idx = symbol_key_arrays(state, count)
    if pm_block_length > 1:
        held = t_idx[::pm_block_length]
        t_idx = np.repeat(held, pm_block_length)[:count]
    alpha1 = alpha1_scale * _QPSK_POINTS[a_idx]
    theta = 2.0 * np.pi * t_idx / THETA_LEVELS
    return alpha1, theta


def step_arrays(
    state: KeystreamState,
    count: int,
    alpha1_scale: float = 1.0,
    pm_block_length: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Public bulk form of the per-symbol (alpha1, theta) key material.

    Lets a receiver stage decryption around its carrier recovery: remove the
    keyed rotation first, track the channel phase on the resulting ring
    signal, then remove the keyed offset.  Consumes keys exactly like
    encrypt_stream/decrypt_stream.
    """
    return _step_arrays(state, count, alpha1_scale, pm_block_length)


def encrypt_stream(
    plain: SymbolStream,
    state: KeystreamState,
    alpha1_scale: float = 1.0,
    pm_block_length: int = 1,
) -> CipherStream:
    """Encrypt a symbol block, advancing the keystream by its length."""
    start = state.counter
    n = plain.symbols.size
    if n == 0:
        return CipherStream(np.empty(0, dtype=np.complex128), start, plain.baud)
    alpha1, theta = _step_arrays(state, n, alpha1_scale, pm_block_length)
    gamma = (plain.symbols + alpha1) * np.exp(1j * theta)
    return CipherStream(gamma, start, plain.baud)


def decrypt_stream(
    cipher: CipherStream,
    state: KeystreamState,
    alpha1_scale: float = 1.0,
    pm_block_length: int = 1,
) -> SymbolStream:
    """Decrypt with a synchronized keystream.

    The state's counter must sit exactly at the cipher's start counter;
    anything else would silently mis-key every symbol, so it raises before
    touching the data.
    """
    if state.counter != cipher.start_counter:
        raise DesynchronizationError(
            f"keystream counter {state.counter} != cipher start "
            f"{cipher.start_counter}"
        )
    n = cipher.symbols.size
    if n == 0:
        return SymbolStream(np.empty(0, dtype=np.complex128), cipher.baud)
    alpha1, theta = _step_arrays(state, n, alpha1_scale, pm_block_length)
    beta = cipher.symbols * np.exp(-1j * theta) - alpha1
    return SymbolStream(beta, cipher.baud)


def net_displacement_stream(
    state: KeystreamState,
    count: int,
    alpha1_scale: float = 1.0,
    pm_block_length: int = 1,
) -> np.ndarray:
    """Bulk net displacements alpha1*e^{j*theta} for `count` symbols."""
    alpha1, theta = _step_arrays(state, count, alpha1_scale, pm_block_length)
    return alpha1 * np.exp(1j * theta)
