"""Manifest and trial files, and the synthetic desk corpus"""

import numpy as np
import pandas as pd
import pytest

from backend.config import CorpusConfig
from backend.core.exceptions import ManifestError
from backend.models.speech_models import Gender, Manifest, ManifestRow
from Data_Engine.audio_io import read_wav, write_wav
from Data_Engine.desk_corpus import make_speaker, synthesize_utterance
from Data_Engine.manifest import load_manifest, load_trials, write_manifest, write_trials

from .conftest import RATE, make_sine


def write_csv(path, text):
    path.write_text(text)
    return path


@pytest.fixture
def wav_dir(tmp_path):
    for name in ("a.wav", "b.wav"):
        write_wav(make_sine(200.0, seconds=0.1), tmp_path / "wav" / name)
    return tmp_path


class TestLoadManifest:

    def test_relative_paths_resolve_against_manifest(self, wav_dir):
        path = write_csv(wav_dir / "m.csv", "utterance_id,speaker_id,gender,wav_path\nu1,s1,M,wav/a.wav\nu2,s2,f,wav/b.wav\n")
        manifest = load_manifest(path)
        assert manifest.utterance_ids == ["u1", "u2"]
        assert [row.gender for row in manifest] == [Gender.MALE, Gender.FEMALE]
        assert manifest.rows[0].wav_path == str(wav_dir / "wav" / "a.wav")

    def test_missing_gender_is_unknown(self, wav_dir):
        path = write_csv(wav_dir / "m.csv", "utterance_id,speaker_id,gender,wav_path\nu1,s1,,wav/a.wav\n")
        assert load_manifest(path).rows[0].gender == Gender.UNKNOWN
        with pytest.raises(ManifestError):
            load_manifest(path, require_gender=True)

    def test_missing_column(self, wav_dir):
        path = write_csv(wav_dir / "m.csv", "utterance_id,speaker_id,wav_path\nu1,s1,wav/a.wav\n")
        with pytest.raises(ManifestError, match="gender"):
            load_manifest(path)

    def test_duplicate_utterance(self, wav_dir):
        path = write_csv(wav_dir / "m.csv", "utterance_id,speaker_id,gender,wav_path\nu1,s1,M,wav/a.wav\nu1,s1,M,wav/b.wav\n")
        with pytest.raises(ManifestError, match="Duplicate"):
            load_manifest(path)

    def test_unresolvable_path(self, wav_dir):
        path = write_csv(wav_dir / "m.csv", "utterance_id,speaker_id,gender,wav_path\nu1,s1,M,wav/zz.wav\n")
        with pytest.raises(ManifestError, match="does not exist"):
            load_manifest(path)
        assert len(load_manifest(path, resolve_paths=False)) == 1

    def test_bad_gender_label(self, wav_dir):
        path = write_csv(wav_dir / "m.csv", "utterance_id,speaker_id,gender,wav_path\nu1,s1,X,wav/a.wav\n")
        with pytest.raises(ManifestError):
            load_manifest(path)

    def test_empty_manifest_warns(self, tmp_path, log_messages):
        path = write_csv(tmp_path / "m.csv", "utterance_id,speaker_id,gender,wav_path\n")
        assert len(load_manifest(path)) == 0
        assert any("empty" in m for m in log_messages)

    def test_write_then_load(self, wav_dir):
        manifest = Manifest([ManifestRow("u1", "s1", Gender.FEMALE, str(wav_dir / "wav" / "a.wav"))])
        path = write_manifest(manifest, wav_dir / "out.csv", relative_to=wav_dir)
        assert pd.read_csv(path)['wav_path'].tolist() == ["wav/a.wav"]
        assert load_manifest(path).rows[0].wav_path == manifest.rows[0].wav_path


class TestTrials:

    def test_labels_are_normalized(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", "enroll_utt,test_utt,label\na,b, Target\na,c,nontarget\n")
        assert load_trials(path)['label'].tolist() == ["target", "nontarget"]

    def test_unknown_label(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", "enroll_utt,test_utt,label\na,b,maybe\n")
        with pytest.raises(ManifestError):
            load_trials(path)

    def test_write_keeps_columns(self, tmp_path):
        trials = pd.DataFrame({'enroll_utt': ['a'], 'test_utt': ['b'], 'label': ['target'], 'extra': [1]})
        frame = pd.read_csv(write_trials(trials, tmp_path / "t.csv"))
        assert list(frame.columns) == ['enroll_utt', 'test_utt', 'label']


class TestDeskCorpus:

    def test_layout(self, desk_corpus):
        out_dir, manifest = desk_corpus
        assert len(manifest) == 12
        assert manifest.speakers == ["spk00", "spk01", "spk02", "spk03"]
        assert (out_dir / "manifest.csv").exists()
        assert (out_dir / "trials.csv").exists()
        assert load_manifest(out_dir / "manifest.csv").utterance_ids == manifest.utterance_ids

    def test_genders_alternate(self, desk_corpus):
        _, manifest = desk_corpus
        genders = manifest.speaker_gender()
        assert genders["spk00"] == Gender.MALE
        assert genders["spk01"] == Gender.FEMALE

    def test_utterances_are_audible_and_bounded(self, desk_corpus):
        _, manifest = desk_corpus
        w = read_wav(manifest.rows[0].wav_path)
        assert w.sample_rate == RATE
        assert w.duration == pytest.approx(1.2, abs=1e-3)
        assert 0.5 < np.max(np.abs(w.samples)) <= 1.0

    def test_seeded(self):
        profile = make_speaker(3, seed=9)
        assert profile == make_speaker(3, seed=9)
        assert profile.base_f0 != make_speaker(3, seed=10).base_f0
        first = synthesize_utterance(profile, 0.6, RATE, np.random.default_rng(1))
        second = synthesize_utterance(profile, 0.6, RATE, np.random.default_rng(1))
        np.testing.assert_array_equal(first.samples, second.samples)

    def test_speaker_profiles_follow_gender(self):
        for index in range(6):
            profile = make_speaker(index, seed=0)
            if profile.gender == Gender.MALE:
                assert 95.0 <= profile.base_f0 <= 140.0
            else:
                assert 170.0 <= profile.base_f0 <= 240.0

    def test_corpus_config_limits(self):
        with pytest.raises(ValueError):
            CorpusConfig(speakers=1)
