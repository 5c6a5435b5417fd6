"""Deterministic keystream expansion of a pre-shared secret.

A secret of up to 16 KiB is hashed with 64-bit FNV-1a into the initial state
of a SplitMix64 generator; each generated word yields one per-symbol key
(a 2-bit constellation-offset index and a 10-bit phase index).  Both
primitives are fully fixed by their constants, so transmitter and receiver
reproduce the identical sequence from the secret alone, bit-exactly, on any
platform.  The generator is NOT claimed cryptographically secure; it is the
simulator's swap-in point for a real cryptographic RNG.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_SECRET_BYTES",
    "THETA_LEVELS",
    "Secret",
    "KeystreamState",
    "SymbolKey",
    "fnv1a64",
    "seed_from_secret",
    "next_u64",
    "next_symbol_key",
    "splitmix64_words",
    "symbol_key_arrays",
]

MAX_SECRET_BYTES = 16384
THETA_LEVELS = 1024

_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 14695981039346656037
_FNV_PRIME = 1099511628211
_SM_GAMMA = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class Secret:
    """Pre-shared secret material, 1 to 16384 bytes."""

    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) == 0:
            raise ValueError("secret must be non-empty")
        if len(self.data) > MAX_SECRET_BYTES:
            raise ValueError(
                f"secret exceeds {MAX_SECRET_BYTES} bytes ({len(self.data)})"
            )

    @classmethod
    def from_hex(cls, hex_string: str) -> "Secret":
        return cls(bytes.fromhex(hex_string))


@dataclass
class SymbolKey:
    """Per-symbol encryption material."""

    alpha1_index: int  # in [0, 3]
    theta_index: int  # in [0, 1023]


@dataclass
class KeystreamState:
    """Sequential SplitMix64 state plus a count of symbols emitted.

    Advancing a state is not thread-safe; one owner at a time.
    """

    state: int
    counter: int = 0


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a: XOR each byte into the hash, then multiply, wrapping."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def seed_from_secret(secret: Secret) -> KeystreamState:
    """Hash the secret into a generator state with the counter at zero."""
    return KeystreamState(state=fnv1a64(secret.data), counter=0)


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def next_u64(state: KeystreamState) -> int:
    """One SplitMix64 step; advances the generator, not the symbol counter."""
    state.state = (state.state + _SM_GAMMA) & _MASK64
    return _mix(state.state)


def next_symbol_key(state: KeystreamState) -> SymbolKey:
    """Draw one word and slice it into per-symbol key indices."""
    w = next_u64(state)
    state.counter += 1
    return SymbolKey(alpha1_index=w & 0x3, theta_index=(w >> 2) & 0x3FF)


_NP_GAMMA = np.uint64(_SM_GAMMA)
_NP_M1 = np.uint64(0xBF58476D1CE4E5B9)
_NP_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64_words(seed: int, count: int) -> np.ndarray:
    """Vectorized SplitMix64: the `count` words a scalar walk from `seed`
    would emit, as uint64.  Bit-identical to repeated next_u64 calls."""
    idx = np.arange(1, count + 1, dtype=np.uint64)
    s = np.uint64(seed & _MASK64) + idx * _NP_GAMMA
    z = (s ^ (s >> np.uint64(30))) * _NP_M1
    z = (z ^ (z >> np.uint64(27))) * _NP_M2
    return z ^ (z >> np.uint64(31))


def symbol_key_arrays(state: KeystreamState, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Bulk form of next_symbol_key: (alpha1_index, theta_index) arrays.

    Advances `state` exactly as `count` scalar next_symbol_key calls would.
    """
    words = splitmix64_words(state.state, count)
    state.state = (state.state + count * _SM_GAMMA) & _MASK64
    state.counter += count
    alpha1 = (words & np.uint64(0x3)).astype(np.int64)
    theta = ((words >> np.uint64(2)) & np.uint64(0x3FF)).astype(np.int64)
    return alpha1, theta
