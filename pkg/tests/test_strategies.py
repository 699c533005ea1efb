"""Formant and F0 scaling strategies"""

import numpy as np
import pytest

from backend.core.exceptions import InvalidParameterError, MissingGenderError
from backend.models.speech_models import FormantFrame, FormantTrack, Gender, PitchTrack, StrategyType
from Strategy_Framework import (
    GenderDependentStrategy,
    GenderIndependentStrategy,
    create_strategy,
    scale_gender_dependent,
    scale_gender_independent,
    scale_tracks,
)

FIVE_FORMANTS = ((500.0, 60.0), (1500.0, 80.0), (2500.0, 100.0), (3500.0, 120.0), (4500.0, 150.0))


def pitch(values):
    f0 = np.asarray(values, dtype=float)
    return PitchTrack(f0=f0, voiced=f0 > 0, hop_ms=10.0, utterance_id="u")


def formants(*frames, ceiling=5500.0):
    return FormantTrack(frames=tuple(FormantFrame(f) for f in frames), hop_ms=10.0, ceiling_hz=ceiling)


class TestGenderIndependent:

    def test_identity_factor(self):
        src_f0 = pitch([0.0, 120.0, 130.0])
        src_formants = formants(FIVE_FORMANTS, (), FIVE_FORMANTS)
        out = scale_gender_independent(src_f0, src_formants, 1.0)
        np.testing.assert_array_equal(out.f0_anon.f0, src_f0.f0)
        assert out.formants_anon.frames == src_formants.frames
        assert out.formant_clip_count == 0

    def test_formants_scale_linearly(self):
        out = scale_gender_independent(pitch([100.0]), formants(FIVE_FORMANTS), 1.1)
        np.testing.assert_allclose(out.formants_anon.frames[0].frequencies, [550.0, 1650.0, 2750.0, 3850.0, 4950.0])
        np.testing.assert_allclose(out.formants_anon.frames[0].bandwidths, [60.0, 80.0, 100.0, 120.0, 150.0])

    def test_f0_scales_and_unvoiced_stays_zero(self):
        out = scale_gender_independent(pitch([200.0, 0.0, 180.0]), formants((), (), ()), 0.5)
        np.testing.assert_array_equal(out.f0_anon.f0, [100.0, 0.0, 90.0])
        np.testing.assert_array_equal(out.f0_anon.voiced, [True, False, True])

    def test_bandwidths_follow_when_asked(self):
        out = scale_gender_independent(pitch([100.0]), formants(FIVE_FORMANTS), 1.2, scale_bandwidths=True)
        np.testing.assert_allclose(out.formants_anon.frames[0].bandwidths, [72.0, 96.0, 120.0, 144.0, 180.0])

    def test_formants_beyond_nyquist_are_clipped(self):
        out = scale_gender_independent(pitch([100.0, 100.0]), formants(FIVE_FORMANTS, FIVE_FORMANTS), 1.3, synthesis_rate=11000)
        assert out.formant_clip_count == 2
        assert out.formants_anon.ceiling_hz == 5500.0
        assert len(out.formants_anon.frames[0]) == 4

    def test_envelope_warp_is_uniform(self):
        out = scale_gender_independent(pitch([0.0, 120.0, 0.0]), formants((), (), ()), 0.8)
        np.testing.assert_array_equal(out.envelope_warp, [0.8, 0.8, 0.8])
        assert out.voiced_frames == [1]

    @pytest.mark.parametrize("alpha", [0.0, -0.5])
    def test_rejects_non_positive_alpha(self, alpha):
        with pytest.raises(InvalidParameterError):
            GenderIndependentStrategy(alpha)

    def test_warns_outside_swept_range(self, log_messages):
        scale_gender_independent(pitch([100.0]), formants(()), 2.0)
        assert any("outside the swept range" in m for m in log_messages)


class TestGenderDependent:

    def test_male_is_raised(self):
        out = scale_gender_dependent(pitch([120.0]), formants(()), 0.3, Gender.MALE)
        assert out.f0_anon.f0[0] == pytest.approx(156.0)
        assert out.effective_factor == pytest.approx(1.3)

    def test_female_is_lowered(self):
        out = scale_gender_dependent(pitch([200.0]), formants(((800.0, 70.0),)), 0.3, Gender.FEMALE)
        assert out.formants_anon.frames[0].frequencies[0] == pytest.approx(560.0)

    @pytest.mark.parametrize("gender", [Gender.MALE, Gender.FEMALE])
    def test_zero_alpha_is_identity(self, gender):
        src = pitch([0.0, 150.0])
        out = scale_gender_dependent(src, formants((), FIVE_FORMANTS), 0.0, gender)
        np.testing.assert_array_equal(out.f0_anon.f0, src.f0)
        assert out.formants_anon.frames[1].frequencies == [f for f, _ in FIVE_FORMANTS]

    def test_unknown_gender(self):
        with pytest.raises(MissingGenderError):
            scale_gender_dependent(pitch([120.0]), formants(()), 0.3, Gender.UNKNOWN)

    @pytest.mark.parametrize("alpha", [-0.1, 1.0, 1.5])
    def test_rejects_alpha_outside_unit_interval(self, alpha):
        with pytest.raises(InvalidParameterError):
            GenderDependentStrategy(alpha)

    def test_manifest_labels_accepted(self):
        assert GenderDependentStrategy(0.2).effective_factor("F") == pytest.approx(0.8)


class TestScaling:

    def test_scaling_twice_equals_scaling_by_product(self):
        rng = np.random.default_rng(20)
        for _ in range(1000):
            n_frames = int(rng.integers(1, 8))
            voiced = rng.random(n_frames) < 0.7
            src_f0 = pitch(np.where(voiced, rng.uniform(60.0, 400.0, n_frames), 0.0))
            frames = []
            for _ in range(n_frames):
                frequencies = np.sort(rng.uniform(200.0, 5000.0, int(rng.integers(0, 6))))
                frames.append(tuple(zip(frequencies, rng.uniform(30.0, 300.0, frequencies.size))))
            src_formants = formants(*frames)
            a, b = rng.uniform(0.6, 1.5, 2)
            scale_bandwidths = bool(rng.random() < 0.5)

            once = scale_tracks(src_f0, src_formants, a, scale_bandwidths=scale_bandwidths)
            twice = scale_tracks(once.f0_anon, once.formants_anon, b, scale_bandwidths=scale_bandwidths)
            direct = scale_tracks(src_f0, src_formants, a * b, scale_bandwidths=scale_bandwidths)

            np.testing.assert_allclose(twice.f0_anon.f0, direct.f0_anon.f0, rtol=1e-12)
            np.testing.assert_array_equal(twice.f0_anon.voiced, direct.f0_anon.voiced)
            np.testing.assert_allclose(
                twice.formants_anon.frequencies_matrix(), direct.formants_anon.frequencies_matrix(), rtol=1e-12
            )
            np.testing.assert_allclose(
                twice.formants_anon.bandwidths_matrix(), direct.formants_anon.bandwidths_matrix(), rtol=1e-12
            )
            assert twice.formants_anon.ceiling_hz == pytest.approx(direct.formants_anon.ceiling_hz, rel=1e-12)
            assert twice.formant_clip_count == direct.formant_clip_count == 0

            composed = once.compose(b)
            np.testing.assert_array_equal(composed.f0_anon.f0, twice.f0_anon.f0)
            assert composed.effective_factor == pytest.approx(a * b, rel=1e-12)

    def test_clipped_formants_stay_dropped_when_composing(self):
        src_f0 = pitch([120.0, 130.0])
        src_formants = formants(FIVE_FORMANTS, FIVE_FORMANTS)
        raised = scale_tracks(src_f0, src_formants, 1.3, synthesis_rate=11000)
        composed = raised.compose(1.0 / 1.3)
        direct = scale_tracks(src_f0, src_formants, 1.0, synthesis_rate=11000)

        assert raised.formant_clip_count == 2
        assert composed.formant_clip_count == 2
        assert [len(frame) for frame in direct.formants_anon.frames] == [5, 5]
        assert [len(frame) for frame in composed.formants_anon.frames] == [4, 4]
        np.testing.assert_allclose(
            composed.formants_anon.frames[0].frequencies, direct.formants_anon.frames[0].frequencies[:4], rtol=1e-12
        )
        np.testing.assert_allclose(composed.f0_anon.f0, src_f0.f0, rtol=1e-12)
        assert composed.source_formants is src_formants

    def test_non_positive_factor(self):
        with pytest.raises(InvalidParameterError):
            scale_tracks(pitch([100.0]), formants(()), 0.0)

    def test_create_strategy_accepts_dashed_names(self):
        strategy = create_strategy("gender-dependent", 0.3)
        assert isinstance(strategy, GenderDependentStrategy)
        assert create_strategy(StrategyType.GENDER_INDEPENDENT, 0.9).effective_factor(Gender.MALE) == 0.9

    def test_unknown_strategy_name(self):
        with pytest.raises(InvalidParameterError):
            create_strategy("pitch-only", 0.5)
