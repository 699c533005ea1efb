"""YIN tracking and pitch correlation"""

import numpy as np
import pytest
from pydantic import ValidationError

from backend.config import PitchConfig
from backend.core.exceptions import (
    DegenerateInputError,
    EmptyInputError,
    InsufficientOverlapError,
    InvalidParameterError,
)
from backend.models.speech_models import PitchTrack, Waveform
from Data_Engine.signal_analysis.pitch import pitch_correlation, yin_f0

from .conftest import RATE


def track(values, hop_ms=10.0):
    f0 = np.asarray(values, dtype=float)
    return PitchTrack(f0=f0, voiced=f0 > 0, hop_ms=hop_ms)


class TestYin:

    def test_pure_tone(self, sine):
        result = yin_f0(sine(220.0), utterance_id="tone")
        assert len(result) == 100
        assert result.utterance_id == "tone"
        interior = result.f0[2:90]
        assert np.all(result.voiced[2:90])
        np.testing.assert_allclose(interior, 220.0, atol=1.0)

    @pytest.mark.parametrize("freq", [100.0, 125.0, 160.0, 200.0, 250.0, 310.0, 355.0, 400.0])
    def test_tone_frequency_across_range(self, sine, freq):
        result = yin_f0(sine(freq))
        assert np.all(result.voiced[2:90])
        np.testing.assert_allclose(result.f0[2:90], freq, atol=1.0)

    @pytest.mark.parametrize("freq", [100.0, 130.0, 150.0, 200.0])
    def test_doubling_tone_doubles_f0(self, sine, freq):
        low = np.median(yin_f0(sine(freq)).f0[2:90])
        high = np.median(yin_f0(sine(2.0 * freq)).f0[2:90])
        assert high / low == pytest.approx(2.0, rel=0.01)

    def test_vowel_fundamental(self, vowel):
        result = yin_f0(vowel(f0=120.0))
        assert abs(result.median_voiced_f0() - 120.0) < 2.0

    def test_white_noise_is_mostly_unvoiced(self, noise):
        result = yin_f0(noise())
        assert np.mean(result.voiced) <= 0.1

    def test_silence(self, silence):
        result = yin_f0(silence)
        assert result.n_voiced == 0
        assert not np.any(result.f0)

    def test_median_filter_keeps_voicing(self, sine):
        raw = yin_f0(sine(220.0))
        smoothed = yin_f0(sine(220.0), PitchConfig(median_filter=True))
        np.testing.assert_array_equal(raw.voiced, smoothed.voiced)

    def test_shorter_than_one_frame(self):
        with pytest.raises(EmptyInputError):
            yin_f0(Waveform(samples=np.zeros(100), sample_rate=RATE))

    def test_f0_max_above_nyquist(self):
        w = Waveform(samples=np.zeros(8000), sample_rate=8000)
        with pytest.raises(InvalidParameterError):
            yin_f0(w, PitchConfig(f0_max=4000.0))

    def test_config_rejects_inverted_range(self):
        with pytest.raises(ValidationError):
            PitchConfig(f0_min=300.0, f0_max=100.0)


class TestPitchCorrelation:

    def test_self_correlation_is_exact(self):
        t = track([0, 100, 120, 140, 135, 0, 110])
        assert pitch_correlation(t, t).value == 1.0

    def test_scale_invariance(self):
        base = np.array([0, 100, 120, 140, 135, 0, 110], dtype=float)
        result = pitch_correlation(track(base), track(0.7 * base))
        assert result.value == pytest.approx(1.0)
        assert result.n_frames == 5

    def test_exact_anticorrelation(self):
        result = pitch_correlation(track([100, 110, 120, 130]), track([130, 120, 110, 100]))
        assert result.value == pytest.approx(-1.0)

    def test_only_jointly_voiced_frames_count(self):
        result = pitch_correlation(track([100, 110, 0, 130, 140]), track([100, 0, 120, 130, 140]))
        assert result.n_frames == 3

    def test_small_length_difference_truncates(self):
        result = pitch_correlation(track([100, 110, 120, 130, 140]), track([100, 110, 120, 130, 140, 150, 160]))
        assert result.n_frames == 5
        assert result.value == pytest.approx(1.0)

    def test_large_length_difference_resamples(self):
        short = track(np.linspace(100, 200, 20))
        long = track(np.linspace(100, 200, 40))
        result = pitch_correlation(long, short)
        assert result.n_frames == 20
        assert result.value == pytest.approx(1.0)

    def test_interpolation_fills_gaps(self):
        orig = track([100, 0, 0, 130, 140, 150])
        anon = track([100, 110, 120, 130, 140, 150])
        assert pitch_correlation(orig, anon).n_frames == 4
        filled = pitch_correlation(orig, anon, interpolate_unvoiced=True)
        assert filled.n_frames == 6
        assert filled.value == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("interpolate", [False, True])
    def test_symmetric_in_its_arguments(self, seed, interpolate):
        rng = np.random.default_rng(seed)
        first = np.where(rng.random(60) < 0.8, rng.uniform(90.0, 250.0, 60), 0.0)
        second_len = 60 + int(rng.integers(-2, 3)) if seed % 2 else 30
        second = np.where(rng.random(second_len) < 0.8, rng.uniform(90.0, 250.0, second_len), 0.0)
        forward = pitch_correlation(track(first), track(second), interpolate_unvoiced=interpolate)
        backward = pitch_correlation(track(second), track(first), interpolate_unvoiced=interpolate)
        assert forward.value == backward.value
        assert forward.n_frames == backward.n_frames

    def test_too_few_joint_frames(self):
        with pytest.raises(InsufficientOverlapError):
            pitch_correlation(track([100, 110, 0, 0]), track([0, 110, 120, 0]))

    def test_constant_track(self):
        with pytest.raises(DegenerateInputError):
            pitch_correlation(track([100, 100, 100, 100]), track([100, 110, 120, 130]))

    def test_different_hops(self):
        with pytest.raises(InvalidParameterError):
            pitch_correlation(track([100, 110, 120]), track([100, 110, 120], hop_ms=5.0))

    def test_empty_track(self):
        with pytest.raises(EmptyInputError):
            pitch_correlation(track([]), track([100, 110, 120]))
