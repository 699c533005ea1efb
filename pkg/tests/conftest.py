"""Shared fixtures: synthetic tones, vowels and a small desk corpus"""

from typing import Sequence

import numpy as np
import pytest
from scipy.signal import lfilter

from backend.config import CorpusConfig
from backend.models.speech_models import Waveform
from Data_Engine.desk_corpus import generate_corpus
from Data_Engine.manifest import write_trials
from Evaluation.verification import build_trials

RATE = 16000


def make_sine(freq: float, seconds: float = 1.0, rate: int = RATE, amplitude: float = 0.5) -> Waveform:
    t = np.arange(int(round(seconds * rate))) / rate
    return Waveform(samples=amplitude * np.sin(2.0 * np.pi * freq * t), sample_rate=rate)


def all_pole(formants: Sequence[float], bandwidths: Sequence[float], rate: int) -> np.ndarray:
    """Denominator of a cascade of second-order resonators"""
    a = np.array([1.0])
    for f, b in zip(formants, bandwidths):
        radius = np.exp(-np.pi * b / rate)
        a = np.convolve(a, [1.0, -2.0 * radius * np.cos(2.0 * np.pi * f / rate), radius ** 2])
    return a


def make_vowel(
    f0: float = 120.0,
    formants: Sequence[float] = (700.0, 1220.0, 2600.0),
    bandwidth: float = 80.0,
    seconds: float = 1.0,
    rate: int = RATE,
) -> Waveform:
    """Impulse train at f0 through an all-pole filter with the given resonances"""
    n = int(round(seconds * rate))
    excitation = np.zeros(n)
    excitation[np.arange(0, n, rate / f0).astype(int)] = 1.0
    samples = lfilter([1.0], all_pole(formants, [bandwidth] * len(formants), rate), excitation)
    return Waveform(samples=0.5 * samples / np.max(np.abs(samples)), sample_rate=rate)


def make_noise(seconds: float = 1.0, rate: int = RATE, seed: int = 7, amplitude: float = 0.3) -> Waveform:
    rng = np.random.default_rng(seed)
    samples = np.clip(amplitude * rng.standard_normal(int(round(seconds * rate))), -1.0, 1.0)
    return Waveform(samples=samples, sample_rate=rate)


@pytest.fixture
def sine():
    return make_sine


@pytest.fixture
def vowel():
    return make_vowel


@pytest.fixture
def noise():
    return make_noise


@pytest.fixture
def silence():
    return Waveform(samples=np.zeros(RATE), sample_rate=RATE)


@pytest.fixture(scope="session")
def desk_corpus(tmp_path_factory):
    """4 speakers x 3 utterances, with manifest.csv and trials.csv"""
    out_dir = tmp_path_factory.mktemp("desk")
    cfg = CorpusConfig(speakers=4, utterances=3, duration_s=1.2, sample_rate=RATE)
    manifest = generate_corpus(out_dir, cfg, seed=11)
    write_trials(build_trials(manifest), out_dir / "trials.csv")
    return out_dir, manifest


@pytest.fixture
def log_messages():
    """Messages logged through loguru while the test runs"""
    from loguru import logger

    messages = []
    sink_id = logger.add(lambda message: messages.append(message.record["message"]), level="DEBUG")
    yield messages
    logger.remove(sink_id)
