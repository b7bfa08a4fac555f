"""Linear-polarization qubit model.

A polarization state is fully described by its angle, identified modulo pi. Rotations about the
propagation axis add to the angle, and a horizontal/vertical projective measurement follows
Malus's law.
"""

import dataclasses
import math
import random
import typing as t

Angle = t.NewType('Angle', float)
"""Polarization angle in radians, canonical representative in [0, pi)."""

Bit = int
"""Classical bit, 0 or 1."""

EIGENSTATE_TOLERANCE = 1e-9
"""Angles closer than this (in radians) to 0 or pi/2 are measured deterministically."""

HALF_PI = math.pi / 2


class InvalidAngleError(ValueError):
    """Raised when an angle is not a finite real number."""


def check_bit(value: Bit) -> Bit:
    assert value in (0, 1), value
    return value


def canonicalize(raw: float) -> Angle:
    """Reduce an angle to its canonical representative in [0, pi)."""
    if not math.isfinite(raw):
        raise InvalidAngleError(f'angle must be finite, got {raw!r}')
    angle = raw % math.pi
    if angle >= math.pi:
        # a tiny negative input rounds up to pi, which is the same state as 0
        angle = 0.0
    return Angle(angle)


def angular_distance(angle1: float, angle2: float) -> float:
    """Distance between two polarization states, taking the mod-pi identification into account."""
    difference = canonicalize(angle1 - angle2)
    return min(difference, math.pi - difference)


@dataclasses.dataclass(frozen=True)
class PolarizationQubit:
    """Linearly polarized single photon."""

    angle: Angle

    def __post_init__(self):
        assert 0.0 <= self.angle < math.pi, self.angle

    @classmethod
    def at(cls, raw_angle: float) -> 'PolarizationQubit':
        return cls(canonicalize(raw_angle))

    @property
    def probability_of_one(self) -> float:
        """Probability of the vertical outcome, sin^2 of the angle."""
        return math.sin(self.angle) ** 2

    def is_close_to(self, angle: float, tolerance: float = EIGENSTATE_TOLERANCE) -> bool:
        return angular_distance(self.angle, angle) <= tolerance

    def __str__(self):
        return f'|{self.angle:.6f}>'


def random_angle(rng: random.Random) -> Angle:
    """Draw a uniformly distributed canonical angle."""
    angle = rng.random() * math.pi
    if angle >= math.pi:
        angle = 0.0
    return Angle(angle)


def rotate(qubit: PolarizationQubit, delta: float) -> PolarizationQubit:
    """Apply the rotation U_y(delta), which adds delta to the polarization angle.

    A non-finite delta raises InvalidAngleError.
    """
    return PolarizationQubit(canonicalize(qubit.angle + delta))


def measure_hv(qubit: PolarizationQubit, rng: random.Random) -> Bit:
    """Measure in the horizontal/vertical basis: 0 for horizontal, 1 for vertical.

    One uniform number is always drawn from rng, so the stream advances identically whether or
    not the qubit is an eigenstate.
    """
    draw = rng.random()
    angle = qubit.angle
    # canonical angle: distance to 0 wraps around pi, distance to pi/2 does not
    if angle <= EIGENSTATE_TOLERANCE or math.pi - angle <= EIGENSTATE_TOLERANCE:
        return 0
    if abs(angle - HALF_PI) <= EIGENSTATE_TOLERANCE:
        return 1
    return int(draw < qubit.probability_of_one)
