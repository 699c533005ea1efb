"""
Toy speaker verifier features for VoiceGuard
MFCC extraction, mean/std utterance embeddings and cosine scoring
"""

from functools import lru_cache

import librosa
import numpy as np
from scipy.fft import dct, rfft

from backend.config import MetricsConfig
from backend.core.exceptions import (
    DegenerateEmbeddingError,
    EmptyInputError,
    InsufficientSpeechError,
    InvalidParameterError,
)
from backend.models.speech_models import Embedding, Waveform, WindowKind
from Data_Engine.audio_io import frame_signal, slice_frames

LOG_FLOOR = 1e-10


@lru_cache(maxsize=16)
def _mel_basis(sample_rate: int, n_fft: int, n_mels: int) -> np.ndarray:
    return librosa.filters.mel(
        sr=sample_rate,
        n_fft=n_fft,
        n_mels=n_mels,
        fmin=0.0,
        fmax=sample_rate / 2.0,
        htk=True,
        norm=None,
    )


def mfcc(
    w: Waveform,
    n_mfcc: int = 20,
    frame_ms: float = 25.0,
    hop_ms: float = 10.0,
    n_mels: int = 26,
) -> np.ndarray:
    """
    Mel-frequency cepstral coefficients, c0 excluded

    Args:
        w: Input waveform, at least one frame long
        n_mfcc: Coefficients kept (8..24), c1..c_n_mfcc
        frame_ms: Frame length (ms)
        hop_ms: Frame step (ms)
        n_mels: Mel filters between 0 Hz and Nyquist

    Returns:
        Array of shape (n_frames, n_mfcc)
    """
    if not 8 <= n_mfcc <= 24:
        raise InvalidParameterError(f"n_mfcc must be in [8, 24], got {n_mfcc}")
    if n_mfcc >= n_mels:
        raise InvalidParameterError(f"n_mfcc {n_mfcc} must be below n_mels {n_mels}")
    if len(w) < w.ms_to_samples(frame_ms):
        raise EmptyInputError(f"Waveform of {len(w)} samples is shorter than one frame")

    frames = frame_signal(w, frame_ms, hop_ms, WindowKind.HANN)
    n_fft = 1 << int(np.ceil(np.log2(frames.frame_len)))
    power = np.abs(rfft(frames.frames, n=n_fft, axis=1)) ** 2
    energies = power @ _mel_basis(w.sample_rate, n_fft, n_mels).T
    log_energies = np.log(np.maximum(energies, LOG_FLOOR))
    cepstra = dct(log_energies, type=2, norm="ortho", axis=1)
    return cepstra[:, 1:n_mfcc + 1]


def active_frames(w: Waveform, frame_ms: float, hop_ms: float, threshold_dbfs: float) -> np.ndarray:
    """Boolean mask of frames whose level exceeds threshold_dbfs"""
    frame_len = w.ms_to_samples(frame_ms)
    hop = max(1, w.ms_to_samples(hop_ms))
    raw = slice_frames(w.samples, frame_len, hop)
    power = np.mean(raw ** 2, axis=1)
    return power > 10.0 ** (threshold_dbfs / 10.0)


def speaker_embedding(
    w: Waveform,
    cfg: MetricsConfig = None,
    utterance_id: str = "",
    speaker_id: str = "",
) -> Embedding:
    """
    Utterance embedding: per-coefficient MFCC mean and standard deviation over active frames

    Args:
        w: Input waveform
        cfg: MFCC and activity settings
        utterance_id: Carried into the embedding
        speaker_id: Carried into the embedding

    Returns:
        Embedding of dimension 2 * n_mfcc
    """
    cfg = cfg or MetricsConfig()
    coefficients = mfcc(w, cfg.n_mfcc, cfg.frame_ms, cfg.hop_ms, cfg.n_mels)
    mask = active_frames(w, cfg.frame_ms, cfg.hop_ms, cfg.active_dbfs)[:coefficients.shape[0]]
    n_active = int(np.count_nonzero(mask))
    if n_active < cfg.min_active_frames:
        raise InsufficientSpeechError(
            f"{utterance_id or 'waveform'}: {n_active} active frames, need {cfg.min_active_frames}"
        )
    active = coefficients[mask]
    vector = np.concatenate([active.mean(axis=0), active.std(axis=0)])
    return Embedding(vector=vector, utterance_id=utterance_id, speaker_id=speaker_id)


def cosine_score(a: Embedding, b: Embedding) -> float:
    """Cosine similarity in [-1, 1]"""
    if a.dimension != b.dimension:
        raise InvalidParameterError(f"Embedding dimensions differ: {a.dimension} vs {b.dimension}")
    a_norm = float(np.linalg.norm(a.vector))
    b_norm = float(np.linalg.norm(b.vector))
    if a_norm == 0.0 or b_norm == 0.0:
        raise DegenerateEmbeddingError(
            f"Zero-norm embedding in pair ({a.utterance_id}, {b.utterance_id})"
        )
    return float(np.clip(np.dot(a.vector, b.vector) / (a_norm * b_norm), -1.0, 1.0))


def normalized_matrix(embeddings) -> np.ndarray:
    """Stack embeddings as unit-norm rows"""
    matrix = np.vstack([e.vector for e in embeddings])
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        bad = [e.utterance_id for e, n in zip(embeddings, norms) if n == 0.0]
        raise DegenerateEmbeddingError(f"Zero-norm embeddings: {bad}")
    return matrix / norms[:, None]
