"""MFCC features, utterance embeddings and cosine scoring"""

import numpy as np
import pytest

from backend.config import MetricsConfig
from backend.core.exceptions import DegenerateEmbeddingError, InsufficientSpeechError, InvalidParameterError
from backend.models.speech_models import Embedding
from Data_Engine.audio_io import read_wav
from Evaluation.embeddings import cosine_score, mfcc, normalized_matrix, speaker_embedding


def embedding(values, utterance_id="u", speaker_id="s"):
    return Embedding(vector=np.asarray(values, dtype=float), utterance_id=utterance_id, speaker_id=speaker_id)


class TestMfcc:

    def test_shape(self, vowel):
        assert mfcc(vowel()).shape == (100, 20)

    def test_silence_hits_the_log_floor(self, silence):
        np.testing.assert_allclose(mfcc(silence), 0.0, atol=1e-9)

    def test_deterministic(self, vowel):
        np.testing.assert_array_equal(mfcc(vowel()), mfcc(vowel()))

    def test_distinct_tones_are_distinguishable(self, sine):
        low = mfcc(sine(1000.0)).mean(axis=0)
        high = mfcc(sine(3000.0)).mean(axis=0)
        similarity = np.dot(low, high) / (np.linalg.norm(low) * np.linalg.norm(high))
        assert similarity < 0.99

    def test_coefficient_range(self, vowel):
        with pytest.raises(InvalidParameterError):
            mfcc(vowel(), n_mfcc=30)


class TestSpeakerEmbedding:

    def test_dimension_and_ids(self, vowel):
        e = speaker_embedding(vowel(), utterance_id="u1", speaker_id="s1")
        assert e.dimension == 40
        assert (e.utterance_id, e.speaker_id) == ("u1", "s1")

    def test_same_input_same_embedding(self, vowel):
        np.testing.assert_array_equal(speaker_embedding(vowel()).vector, speaker_embedding(vowel()).vector)

    def test_gain_invariance(self, vowel):
        w = vowel()
        quieter = w.with_samples(0.5 * w.samples)
        assert cosine_score(speaker_embedding(w), speaker_embedding(quieter)) > 0.99

    def test_silence_is_not_speech(self, silence):
        with pytest.raises(InsufficientSpeechError):
            speaker_embedding(silence)

    def test_short_utterance_is_not_enough(self, vowel):
        with pytest.raises(InsufficientSpeechError):
            speaker_embedding(vowel(seconds=0.4))
        assert speaker_embedding(vowel(seconds=0.4), MetricsConfig(min_active_frames=20)).dimension == 40

    def test_same_speaker_scores_higher(self, desk_corpus):
        _, manifest = desk_corpus
        embeddings = [speaker_embedding(read_wav(r.wav_path), None, r.utterance_id, r.speaker_id) for r in manifest]
        same, different = [], []
        for i, a in enumerate(embeddings):
            for b in embeddings[i + 1:]:
                (same if a.speaker_id == b.speaker_id else different).append(cosine_score(a, b))
        assert np.mean(same) > np.mean(different)


class TestCosine:

    def test_reference_values(self):
        a = embedding([1.0, 2.0, 3.0])
        assert cosine_score(a, a) == pytest.approx(1.0)
        assert cosine_score(a, embedding([-1.0, -2.0, -3.0])) == pytest.approx(-1.0)
        assert cosine_score(embedding([1.0, 0.0]), embedding([0.0, 2.0])) == 0.0

    def test_zero_norm(self):
        with pytest.raises(DegenerateEmbeddingError):
            cosine_score(embedding([0.0, 0.0]), embedding([1.0, 0.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidParameterError):
            cosine_score(embedding([1.0, 0.0]), embedding([1.0, 0.0, 0.0]))

    def test_normalized_rows(self):
        rows = normalized_matrix([embedding([3.0, 4.0]), embedding([0.0, 2.0])])
        np.testing.assert_allclose(rows, [[0.6, 0.8], [0.0, 1.0]])
