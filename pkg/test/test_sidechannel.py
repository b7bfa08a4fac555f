"""Unit tests for the beam-splitter amplitude check."""

import math
import unittest

import numpy as np

from kkkpsim.sidechannel import \
    AmplitudeCheck, CoherentAmplitude, amplitude_check, beamsplit, click_frequency, \
    dark_port_click_probability, dark_port_mean, detection_probability


class Tests(unittest.TestCase):

    def test_identical_pulses(self):
        pulse = CoherentAmplitude(0.8, -0.3)
        self.assertEqual(dark_port_mean(pulse, pulse), 0.0)
        self.assertEqual(dark_port_click_probability(pulse, pulse), 0.0)
        self.assertEqual(detection_probability(pulse, pulse, 1000), 0.0)
        rng = np.random.default_rng(0)
        for _ in range(1000):
            self.assertIs(amplitude_check(pulse, pulse, rng), AmplitudeCheck.PASS)
        self.assertEqual(click_frequency(pulse, pulse, 10000, rng), 0.0)

    def test_beamsplit_examples(self):
        alpha = CoherentAmplitude(0.7, 0.2)
        bright, dark = beamsplit(alpha, alpha)
        self.assertAlmostEqual(bright.value, math.sqrt(2) * alpha.value, places=12)
        self.assertEqual(dark.value, 0)
        bright, dark = beamsplit(alpha, CoherentAmplitude(0.0))
        self.assertAlmostEqual(bright.value, alpha.value / math.sqrt(2), places=12)
        self.assertAlmostEqual(dark.value, alpha.value / math.sqrt(2), places=12)
        vacuum = CoherentAmplitude(0.0)
        self.assertEqual(beamsplit(vacuum, vacuum), (vacuum, vacuum))

    def test_click_probability_examples(self):
        self.assertAlmostEqual(
            dark_port_click_probability(CoherentAmplitude(1.0), CoherentAmplitude(0.0)),
            1 - math.exp(-0.5), places=12)
        self.assertAlmostEqual(
            dark_port_click_probability(CoherentAmplitude(1.0), CoherentAmplitude(-1.0)),
            1 - math.exp(-2.0), places=12)
        strong = dark_port_click_probability(
            CoherentAmplitude(math.sqrt(20.0)), CoherentAmplitude(0.0))
        self.assertGreater(strong, 0.9999)

    def test_energy_conservation(self):
        rng = np.random.default_rng(1)
        for re1, im1, re2, im2 in rng.normal(size=(100, 4)):
            a = CoherentAmplitude(re1, im1)
            b = CoherentAmplitude(re2, im2)
            bright, dark = beamsplit(a, b)
            self.assertAlmostEqual(
                bright.mean_photon_number + dark.mean_photon_number,
                a.mean_photon_number + b.mean_photon_number, delta=1e-12)

    def test_monotonic(self):
        probabilities = [
            dark_port_click_probability(CoherentAmplitude(distance), CoherentAmplitude(0.0))
            for distance in np.linspace(0.0, 5.0, 50)]
        for smaller, larger in zip(probabilities, probabilities[1:]):
            self.assertLess(smaller, larger)

    def test_detection_probability(self):
        a = CoherentAmplitude(1.0)
        b = CoherentAmplitude(0.0)
        self.assertEqual(detection_probability(a, b, 0), 0.0)
        self.assertAlmostEqual(
            detection_probability(a, b, 1), dark_port_click_probability(a, b), places=12)
        self.assertAlmostEqual(detection_probability(a, b, 10), 1 - math.exp(-5.0), places=12)

    def test_click_frequency(self):
        a = CoherentAmplitude(1.0)
        b = CoherentAmplitude(0.0)
        trials = 100000
        expected = dark_port_click_probability(a, b)
        frequency = click_frequency(a, b, trials, np.random.default_rng(2))
        tolerance = 5 * math.sqrt(expected * (1 - expected) / trials)
        self.assertLessEqual(abs(frequency - expected), tolerance)

    def test_amplitude_check_detects(self):
        rng = np.random.default_rng(3)
        a = CoherentAmplitude(1.0)
        b = CoherentAmplitude(0.0)
        results = [amplitude_check(a, b, rng) for _ in range(10000)]
        detected = sum(_ is AmplitudeCheck.EVE_DETECTED for _ in results) / len(results)
        expected = dark_port_click_probability(a, b)
        self.assertLessEqual(abs(detected - expected), 5 * math.sqrt(expected / len(results)))

    def test_complex_amplitude(self):
        pulse = CoherentAmplitude.from_complex(complex(0.6, 0.8))
        self.assertEqual(pulse.value, complex(0.6, 0.8))
        self.assertAlmostEqual(pulse.mean_photon_number, 1.0, places=12)
        with self.assertRaises(AssertionError):
            CoherentAmplitude(math.nan)
