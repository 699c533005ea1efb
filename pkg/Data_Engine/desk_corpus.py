"""
Synthetic desk corpus for VoiceGuard
Seeded multi-speaker vowel corpus with per-speaker F0 and vocal-tract profiles
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from loguru import logger
from scipy.signal import lfilter

from backend.config import CorpusConfig
from backend.models.speech_models import Gender, Manifest, ManifestRow, Waveform
from Data_Engine.audio_io import write_wav
from Data_Engine.manifest import write_manifest

PathLike = Union[str, Path]

# Adult male vowel formants F1-F4 (Hz); speakers scale them by their vocal-tract factor
VOWEL_FORMANTS = {
    'i': (270.0, 2290.0, 3010.0, 3600.0),
    'e': (530.0, 1840.0, 2480.0, 3500.0),
    'a': (730.0, 1090.0, 2440.0, 3400.0),
    'o': (570.0, 840.0, 2410.0, 3300.0),
    'u': (300.0, 870.0, 2240.0, 3300.0),
}
FORMANT_BANDWIDTHS = (60.0, 90.0, 120.0, 160.0)

F0_RANGE = {Gender.MALE: (95.0, 140.0), Gender.FEMALE: (170.0, 240.0)}
TRACT_SCALE_RANGE = {Gender.MALE: (0.92, 1.02), Gender.FEMALE: (1.10, 1.22)}

BLOCK_MS = 5.0
TRANSITION_MS = 40.0
FADE_MS = 20.0
PEAK_LEVEL = 0.7
NOISE_LEVEL = 1e-3


@dataclass
class SpeakerProfile:
    """Voice parameters of one synthetic speaker"""
    speaker_id: str
    gender: Gender
    base_f0: float
    tract_scale: float
    formant_jitter: Tuple[float, ...] = field(default_factory=tuple)

    def formants(self, vowel: str) -> np.ndarray:
        return np.asarray(VOWEL_FORMANTS[vowel]) * self.tract_scale * np.asarray(self.formant_jitter)


def make_speaker(index: int, seed: int, prefix: str = "spk") -> SpeakerProfile:
    """Even indices are male, odd indices female"""
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    gender = Gender.MALE if index % 2 == 0 else Gender.FEMALE
    return SpeakerProfile(
        speaker_id=f"{prefix}{index:02d}",
        gender=gender,
        base_f0=float(rng.uniform(*F0_RANGE[gender])),
        tract_scale=float(rng.uniform(*TRACT_SCALE_RANGE[gender])),
        formant_jitter=tuple(float(j) for j in rng.uniform(0.95, 1.05, size=len(FORMANT_BANDWIDTHS))),
    )


def _resonator(formants: np.ndarray, sample_rate: int) -> np.ndarray:
    """All-pole denominator with one conjugate pole pair per formant"""
    nyquist = sample_rate / 2.0
    poles = []
    for frequency, bandwidth in zip(formants, FORMANT_BANDWIDTHS):
        if frequency >= 0.95 * nyquist:
            continue
        radius = math.exp(-math.pi * bandwidth / sample_rate)
        angle = 2.0 * math.pi * frequency / sample_rate
        poles.extend([radius * np.exp(1j * angle), radius * np.exp(-1j * angle)])
    return np.real(np.poly(poles))


def _pulse_train(f0: np.ndarray, sample_rate: int) -> np.ndarray:
    """Unit impulses at phase wraps of the per-sample F0 contour"""
    phase = np.cumsum(f0 / sample_rate)
    pulses = np.zeros_like(phase)
    pulses[1:][np.floor(phase[1:]) > np.floor(phase[:-1])] = 1.0
    pulses[0] = 1.0
    return pulses


def synthesize_utterance(
    profile: SpeakerProfile,
    duration_s: float,
    sample_rate: int,
    rng: np.random.Generator,
) -> Waveform:
    """
    Five vowels in random order with a falling, gently modulated F0 contour

    Args:
        profile: Speaker voice parameters
        duration_s: Utterance length (s)
        sample_rate: Output rate (Hz)
        rng: Generator for vowel order, intonation and noise

    Returns:
        Peak-normalized Waveform
    """
    n = int(round(duration_s * sample_rate))
    t = np.arange(n) / sample_rate
    rate_hz = rng.uniform(1.5, 3.0)
    depth = rng.uniform(0.04, 0.1)
    declination = np.linspace(1.05, 0.92, n)
    f0 = profile.base_f0 * declination * (1.0 + depth * np.sin(2.0 * np.pi * rate_hz * t + rng.uniform(0, 2 * np.pi)))

    source = _pulse_train(f0, sample_rate)
    source = lfilter([1.0], [1.0, -1.8, 0.81], source)  # glottal roll-off
    source = lfilter([1.0, -1.0], [1.0], source)  # lip radiation

    vowels = [str(v) for v in rng.permutation(list(VOWEL_FORMANTS))]
    segment = n / len(vowels)
    transition = TRANSITION_MS * sample_rate / 1000.0
    block = max(1, int(round(BLOCK_MS * sample_rate / 1000.0)))

    output = np.zeros(n)
    state = None
    for start in range(0, n, block):
        centre = start + block / 2.0
        index = min(int(centre // segment), len(vowels) - 1)
        formants = profile.formants(vowels[index])
        # Linear glide into the next vowel over the last part of each segment
        into_next = centre - ((index + 1) * segment - transition)
        if index + 1 < len(vowels) and into_next > 0:
            weight = min(1.0, into_next / transition)
            formants = (1.0 - weight) * formants + weight * profile.formants(vowels[index + 1])
        denominator = _resonator(formants, sample_rate)
        if state is None or state.size != denominator.size - 1:
            state = np.zeros(denominator.size - 1)
        output[start:start + block], state = lfilter([1.0], denominator, source[start:start + block], zi=state)

    output = output / max(np.max(np.abs(output)), 1e-12) * PEAK_LEVEL
    output = output + NOISE_LEVEL * rng.standard_normal(n)
    fade = min(n // 2, int(round(FADE_MS * sample_rate / 1000.0)))
    if fade:
        ramp = np.linspace(0.0, 1.0, fade)
        output[:fade] *= ramp
        output[n - fade:] *= ramp[::-1]
    return Waveform(samples=np.clip(output, -1.0, 1.0), sample_rate=sample_rate)


def generate_corpus(
    out_dir: PathLike,
    cfg: CorpusConfig = None,
    seed: int = 0,
) -> Manifest:
    """
    Write a seeded desk corpus and its manifest

    Args:
        out_dir: Output directory; WAVs go to out_dir/wav
        cfg: Speaker count, utterances per speaker, duration, rate and id prefix
        seed: Corpus seed

    Returns:
        Manifest of the written utterances (also saved as out_dir/manifest.csv)
    """
    cfg = cfg or CorpusConfig()
    out_dir = Path(out_dir)
    wav_dir = out_dir / "wav"
    logger.info(
        f"Generating desk corpus: {cfg.speakers} speakers x {cfg.utterances} utterances "
        f"at {cfg.sample_rate} Hz (seed {seed}) into {out_dir}"
    )

    rows: List[ManifestRow] = []
    for s in range(cfg.speakers):
        profile = make_speaker(s, seed, cfg.speaker_prefix)
        logger.debug(
            f"{profile.speaker_id}: {profile.gender.value}, F0 {profile.base_f0:.1f} Hz, "
            f"tract scale {profile.tract_scale:.3f}"
        )
        for u in range(cfg.utterances):
            rng = np.random.default_rng(np.random.SeedSequence([seed, s, u]))
            utterance_id = f"{profile.speaker_id}_u{u:02d}"
            wav_path = wav_dir / f"{utterance_id}.wav"
            write_wav(synthesize_utterance(profile, cfg.duration_s, cfg.sample_rate, rng), wav_path)
            rows.append(ManifestRow(utterance_id, profile.speaker_id, profile.gender, str(wav_path)))

    manifest = Manifest(rows)
    write_manifest(manifest, out_dir / "manifest.csv", relative_to=out_dir)
    logger.info(f"Desk corpus written: {len(manifest)} utterances")
    return manifest
