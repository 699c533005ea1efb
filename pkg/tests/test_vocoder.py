"""Envelope warping, excitation and overlap-add resynthesis"""

import numpy as np
import pytest

from backend.config import SynthesisConfig
from backend.core.exceptions import EmptyInputError, InvalidParameterError
from backend.models.speech_models import PitchTrack, Waveform
from Anonymization_Engine.vocoder import build_excitation, resynthesize, utterance_rng, warp_envelope
from Data_Engine.signal_analysis.lpc import poly_roots

from .conftest import RATE, all_pole


def upper_angles(denominator):
    roots = poly_roots(denominator)
    return np.sort(np.angle(roots[roots.imag > 1e-9]))


def flat_track(value, n_frames=20):
    f0 = np.full(n_frames, float(value))
    return PitchTrack(f0=f0, voiced=f0 > 0, hop_ms=10.0)


class TestWarpEnvelope:

    def test_unit_factor_keeps_envelope(self):
        a = all_pole([700.0, 1220.0, 2600.0], [80.0] * 3, RATE)
        envelope = warp_envelope(a, 1.0, SynthesisConfig())
        np.testing.assert_allclose(envelope.denominator, a, atol=1e-9)
        assert envelope.clamped == 0
        assert envelope.unstable == 0

    def test_pole_angles_scale(self):
        a = all_pole([700.0, 1220.0, 2600.0], [80.0] * 3, RATE)
        warped = warp_envelope(a, 1.2, SynthesisConfig())
        np.testing.assert_allclose(upper_angles(warped.denominator), 1.2 * upper_angles(a), rtol=1e-6)

    def test_angles_past_guard_are_pinned(self):
        cfg = SynthesisConfig()
        a = all_pole([7000.0], [100.0], RATE)
        envelope = warp_envelope(a, 1.5, cfg)
        assert envelope.clamped == 1
        roots = poly_roots(envelope.denominator)
        np.testing.assert_allclose(np.abs(roots), cfg.damped_radius, rtol=1e-6)
        np.testing.assert_allclose(np.max(np.angle(roots)), cfg.nyquist_guard * np.pi, rtol=1e-6)

    def test_unstable_poles_are_pulled_inside(self):
        cfg = SynthesisConfig()
        pole = 1.02 * np.exp(1j * 0.5)
        a = np.real(np.poly([pole, np.conj(pole)]))
        envelope = warp_envelope(a, 1.0, cfg)
        assert envelope.unstable == 1
        np.testing.assert_allclose(np.abs(poly_roots(envelope.denominator)), cfg.max_pole_radius, rtol=1e-6)

    def test_rejects_non_positive_factor(self):
        with pytest.raises(InvalidParameterError):
            warp_envelope(np.array([1.0, -0.5]), 0.0, SynthesisConfig())


class TestExcitation:

    def test_pulses_are_evenly_spaced_across_segments(self):
        rng = np.random.default_rng(0)
        excitation = build_excitation(flat_track(100.0), 3200, 160, 400, RATE, rng)
        positions = np.flatnonzero(excitation)
        assert len(positions) == pytest.approx(20, abs=1)
        assert set(np.diff(positions)) <= {159, 160, 161}
        np.testing.assert_allclose(excitation[positions], np.sqrt(RATE / 100.0))

    def test_unvoiced_is_unit_noise(self):
        excitation = build_excitation(flat_track(0.0), 16000, 160, 400, RATE, np.random.default_rng(1))
        assert np.std(excitation) == pytest.approx(1.0, rel=0.05)

    def test_seeded_generators_repeat(self):
        first = utterance_rng(4, "spk000_u00")
        second = utterance_rng(4, "spk000_u00")
        other = utterance_rng(4, "spk000_u01")
        np.testing.assert_array_equal(first.standard_normal(8), second.standard_normal(8))
        assert not np.array_equal(utterance_rng(4, "spk000_u00").standard_normal(8), other.standard_normal(8))
        reseeded = utterance_rng(5, "spk000_u00")
        assert not np.array_equal(reseeded.standard_normal(8), utterance_rng(4, "spk000_u00").standard_normal(8))


class TestResynthesize:

    def test_length_is_preserved(self, vowel):
        w = vowel(seconds=0.73)
        track = flat_track(120.0, n_frames=74)
        result = resynthesize(w, track, np.ones(74), SynthesisConfig(), np.random.default_rng(0))
        assert len(result.waveform) == len(w)
        assert result.waveform.sample_rate == RATE
        assert np.max(np.abs(result.waveform.samples)) <= 1.0

    def test_same_generator_state_gives_same_output(self, noise):
        w = noise(seconds=0.5)
        track = flat_track(0.0, n_frames=50)
        first = resynthesize(w, track, np.ones(50), SynthesisConfig(), np.random.default_rng(9))
        second = resynthesize(w, track, np.ones(50), SynthesisConfig(), np.random.default_rng(9))
        np.testing.assert_array_equal(first.waveform.samples, second.waveform.samples)

    def test_too_short(self):
        w = Waveform(samples=np.full(100, 0.1), sample_rate=RATE)
        with pytest.raises(EmptyInputError):
            resynthesize(w, flat_track(100.0, 1), np.ones(1), SynthesisConfig(), np.random.default_rng(0))
