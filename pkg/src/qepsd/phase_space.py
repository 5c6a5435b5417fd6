"""Complex-amplitude phase-space states and displacement operators.

States are classical complex amplitudes: a coherent state is fully described
by one point in the (in-phase, quadrature) plane.  Displacements act on such
points; composing two displacements picks up a physically unobservable global
phase, which the "reduced" form discards so that composition becomes plain
complex addition.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = [
    "PhasePoint",
    "Displacement",
    "ComposedDisplacement",
    "compose_full",
    "reduce_displacement",
    "apply_reduced",
    "invert",
    "decompose",
]

# QPSK alphabet used by the "qam_phase" split rule; kept local to avoid a
# circular import with the modem module.
_QPSK_POINTS = (1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j)


@dataclass(frozen=True)
class PhasePoint:
    """A point in phase space: in-phase and quadrature amplitude."""

    i: float
    q: float

    @classmethod
    def from_complex(cls, z: complex) -> "PhasePoint":
        return cls(float(z.real), float(z.imag))

    @classmethod
    def make_polar(cls, amplitude: float, phase: float) -> "PhasePoint":
        return cls(amplitude * math.cos(phase), amplitude * math.sin(phase))

    def to_complex(self) -> complex:
        return complex(self.i, self.q)

    def amplitude(self) -> float:
        return math.hypot(self.i, self.q)

    def phase(self) -> float:
        # atan2 returns values in (-pi, pi]; (0, 0) maps to 0.
        return math.atan2(self.q, self.i)

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        return PhasePoint(self.i + other.i, self.q + other.q)

    def __sub__(self, other: "PhasePoint") -> "PhasePoint":
        return PhasePoint(self.i - other.i, self.q - other.q)

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(-self.i, -self.q)


@dataclass(frozen=True)
class Displacement:
    """A displacement operator, represented by its complex parameter."""

    param: PhasePoint

    @classmethod
    def of(cls, z: complex) -> "Displacement":
        return cls(PhasePoint.from_complex(z))


@dataclass(frozen=True)
class ComposedDisplacement:
    """Net displacement of a two-operator product plus its global phase.

    The global phase is stored as a real angle (radians): the exponent of the
    phase factor is purely imaginary, so the angle carries all of it and the
    unit-magnitude property holds by construction.
    """

    net: Displacement
    global_phase: float


def compose_full(a: Displacement, b: Displacement) -> ComposedDisplacement:
    """Compose two displacements, keeping the global phase of the product.

    The phase-factor exponent is a*conj(b) - conj(a)*b, purely imaginary;
    the returned angle is its imaginary part, 2*Im(a*conj(b)).
    """
    alpha = a.param.to_complex()
    beta = b.param.to_complex()
    phase = 2.0 * (alpha * beta.conjugate()).imag
    return ComposedDisplacement(Displacement(a.param + b.param), phase)


def reduce_displacement(c: ComposedDisplacement) -> Displacement:
    """Discard the global phase, leaving the commuting reduced operator."""
    return c.net


def apply_reduced(d: Displacement, state: PhasePoint) -> PhasePoint:
    """Apply a reduced displacement: plain addition of complex amplitudes."""
    return d.param + state


def invert(d: Displacement) -> Displacement:
    """Inverse displacement: sign-flip of the parameter, exact in floats."""
    return Displacement(-d.param)


def decompose(alpha: PhasePoint, parts: int, split_rule: str = "equal") -> list[Displacement]:
    """Split one displacement into `parts` displacements summing to it.

    The last part is always computed as the exact remainder, so the sum of
    parameters reproduces `alpha` bit-for-bit under float addition order
    left-to-right.

    split_rule "equal": first parts are alpha/parts each.
    split_rule "qam_phase": first part snapped to the nearest QPSK point
    (mirrors a constellation-plus-phase operator split), middle parts equal
    shares of the remainder.
    """
    if parts < 2:
        raise ValueError(f"decompose needs at least 2 parts, got {parts}")
    z = alpha.to_complex()
    leading: list[complex] = []
    if split_rule == "equal":
        leading = [z / parts] * (parts - 1)
    elif split_rule == "qam_phase":
        snapped = min(_QPSK_POINTS, key=lambda p: abs(z - p))
        leading.append(snapped)
        rest = z - snapped
        if parts > 2:
            leading.extend([rest / (parts - 1)] * (parts - 2))
    else:
        raise ValueError(f"unknown split_rule {split_rule!r}")
    remainder = z - sum(leading, 0j)
    out = [Displacement.of(p) for p in leading]
    out.append(Displacement.of(remainder))
    return out
