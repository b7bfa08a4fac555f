"""Beam-splitter check of the two pulses in a coherent-state implementation.

Alice interferes the two incoming pulses on a lossless 50:50 beam splitter. Identical pulses
leave one output port dark; any photon there means the pulses differ, e.g. because Eve sent
unequal spy pulses to learn the blocking factor. Detectors are ideal: unit efficiency and no
dark counts.
"""

import dataclasses
import enum
import math
import typing as t

import numpy as np

SQRT_HALF = math.sqrt(0.5)


@dataclasses.dataclass(frozen=True)
class CoherentAmplitude:
    """Complex field amplitude of a coherent pulse; its mean photon number is |alpha|^2."""

    re: float
    im: float = 0.0

    def __post_init__(self):
        assert math.isfinite(self.re) and math.isfinite(self.im), (self.re, self.im)

    @classmethod
    def from_complex(cls, value: complex) -> 'CoherentAmplitude':
        return cls(value.real, value.imag)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def mean_photon_number(self) -> float:
        return self.re ** 2 + self.im ** 2


class AmplitudeCheck(enum.Enum):
    PASS = 'pass'
    EVE_DETECTED = 'eve_detected'


def beamsplit(
        a: CoherentAmplitude,
        b: CoherentAmplitude) -> t.Tuple[CoherentAmplitude, CoherentAmplitude]:
    """Return the bright port (a + b)/sqrt(2) and the dark port (a - b)/sqrt(2)."""
    bright = (a.value + b.value) * SQRT_HALF
    dark = (a.value - b.value) * SQRT_HALF
    return CoherentAmplitude.from_complex(bright), CoherentAmplitude.from_complex(dark)


def dark_port_mean(a: CoherentAmplitude, b: CoherentAmplitude) -> float:
    """Mean photon number |a - b|^2 / 2 at the dark port."""
    _, dark = beamsplit(a, b)
    return dark.mean_photon_number


def dark_port_click_probability(a: CoherentAmplitude, b: CoherentAmplitude) -> float:
    """Probability of at least one photon at the dark port: 1 - exp(-|a - b|^2 / 2)."""
    return -math.expm1(-dark_port_mean(a, b))


def amplitude_check(a: CoherentAmplitude, b: CoherentAmplitude,
                    rng: np.random.Generator) -> AmplitudeCheck:
    """Sample the dark-port photon count once; any click reveals unequal pulses."""
    photons = rng.poisson(dark_port_mean(a, b))
    return AmplitudeCheck.EVE_DETECTED if photons > 0 else AmplitudeCheck.PASS


def click_frequency(a: CoherentAmplitude, b: CoherentAmplitude, trials: int,
                    rng: np.random.Generator) -> float:
    """Fraction of trials in which the dark port clicks."""
    assert trials > 0, trials
    photons = rng.poisson(dark_port_mean(a, b), size=trials)
    return np.count_nonzero(photons) / trials


def detection_probability(a: CoherentAmplitude, b: CoherentAmplitude, checks: int) -> float:
    """Probability that at least one of several independently checked pulse pairs clicks."""
    assert checks >= 0, checks
    return -math.expm1(-checks * dark_port_mean(a, b))
