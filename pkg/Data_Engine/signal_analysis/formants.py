"""
Formant analysis for VoiceGuard
Frame-wise F1-F5 estimation from the roots of a Burg LPC polynomial
"""

import math
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.signal import lfilter

from backend.config import FormantConfig
from backend.core.exceptions import EmptyInputError, UnstablePredictorError
from backend.models.speech_models import FormantFrame, FormantTrack, Gender, Waveform, WindowKind
from Data_Engine.audio_io import make_window, resample, slice_frames
from Data_Engine.signal_analysis.lpc import lpc_burg, poly_roots

MIN_FORMANT_HZ = 50.0


def pre_emphasis_coefficient(corner_hz: float, sample_rate: int) -> float:
    """First-order pre-emphasis coefficient exp(-2*pi*corner/rate)"""
    return math.exp(-2.0 * math.pi * corner_hz / sample_rate)


def roots_to_formants(
    roots: np.ndarray,
    sample_rate: float,
    ceiling_hz: float,
    max_bandwidth_hz: float,
) -> List[Tuple[float, float]]:
    """
    Convert LPC roots to ascending (frequency, bandwidth) pairs

    Args:
        roots: Complex roots of A(z)
        sample_rate: Rate the predictor was fitted at
        ceiling_hz: Upper frequency limit (exclusive)
        max_bandwidth_hz: Wider resonances are discarded

    Returns:
        Candidates in (50 Hz, ceiling) sorted by frequency
    """
    upper = roots[np.imag(roots) > 0]
    radius = np.abs(upper)
    frequencies = np.angle(upper) * sample_rate / (2.0 * np.pi)
    with np.errstate(divide="ignore"):
        bandwidths = -(sample_rate / np.pi) * np.log(radius)

    keep = (
        (frequencies > MIN_FORMANT_HZ)
        & (frequencies < ceiling_hz)
        & (bandwidths > 0)
        & (bandwidths <= max_bandwidth_hz)
    )
    pairs = sorted(zip(frequencies[keep].tolist(), bandwidths[keep].tolist()))

    # Strictly ascending frequencies; a duplicated root keeps its narrower copy
    unique: List[Tuple[float, float]] = []
    for frequency, bandwidth in pairs:
        if unique and frequency <= unique[-1][0]:
            if bandwidth < unique[-1][1]:
                unique[-1] = (unique[-1][0], bandwidth)
            continue
        unique.append((frequency, bandwidth))
    return unique


def estimate_formants(
    w: Waveform,
    cfg: FormantConfig = None,
    gender: Optional[Gender] = None,
    utterance_id: str = "",
) -> FormantTrack:
    """
    LPC formant tracker

    Args:
        w: Input waveform, at least one frame long
        cfg: Formant configuration; an unset ceiling is resolved from gender
        gender: Speaker gender used for the default ceiling
        utterance_id: Carried into the returned track

    Returns:
        FormantTrack with one frame per hop of the input
    """
    cfg = (cfg or FormantConfig()).for_gender(gender or Gender.UNKNOWN)
    ceiling = float(cfg.ceiling_hz)
    frame_len_in = w.ms_to_samples(cfg.frame_ms)
    hop_in = max(1, w.ms_to_samples(cfg.hop_ms))
    if len(w) < frame_len_in:
        raise EmptyInputError(f"Waveform of {len(w)} samples is shorter than one {frame_len_in}-sample frame")

    analysis = resample(w, int(round(2.0 * ceiling)))
    rate = analysis.sample_rate
    frame_len = analysis.ms_to_samples(cfg.frame_ms)
    hop = max(1, analysis.ms_to_samples(cfg.hop_ms))
    n_frames = math.ceil(len(w) / hop_in)

    raw = slice_frames(analysis.samples, frame_len, hop, n_frames)
    emphasized_signal = lfilter([1.0, -pre_emphasis_coefficient(cfg.pre_emphasis_hz, rate)], [1.0], analysis.samples)
    emphasized = slice_frames(emphasized_signal, frame_len, hop, n_frames)
    window = make_window(WindowKind.GAUSSIAN, frame_len)
    silence_power = 10.0 ** (cfg.silence_dbfs / 10.0)

    frames = []
    for index in range(n_frames):
        if np.mean(raw[index] ** 2) < silence_power:
            frames.append(FormantFrame())
            continue
        fit = lpc_burg(emphasized[index] * window, cfg.order)
        if fit.zero_energy:
            frames.append(FormantFrame())
            continue
        if not fit.is_minimum_phase:
            raise UnstablePredictorError(
                f"{utterance_id or 'waveform'}: frame {index} predictor has reflection coefficients "
                f"{fit.reflection[np.abs(fit.reflection) >= 1.0].tolist()} on or outside the unit circle"
            )
        candidates = roots_to_formants(poly_roots(fit.polynomial), rate, ceiling, cfg.max_bandwidth_hz)
        frames.append(FormantFrame(tuple(candidates[:cfg.max_formants])))

    empty = sum(1 for frame in frames if not len(frame))
    if empty == n_frames:
        logger.debug(f"{utterance_id or 'waveform'}: no formants found in any of {n_frames} frames")

    return FormantTrack(
        frames=tuple(frames),
        hop_ms=cfg.hop_ms,
        ceiling_hz=ceiling,
        max_formants=cfg.max_formants,
        utterance_id=utterance_id,
    )
