"""
Pitch analysis for VoiceGuard
YIN F0 tracking and the Pearson pitch-correlation (rho_F0) metric
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.signal import correlate, medfilt

from backend.config import PitchConfig
from backend.core.exceptions import (
    DegenerateInputError,
    EmptyInputError,
    InsufficientOverlapError,
    InvalidParameterError,
)
from backend.models.speech_models import PitchTrack, Waveform
from Data_Engine.audio_io import slice_frames

# Frames quieter than this mean-square level are unvoiced without running YIN
SILENCE_POWER = 1e-10
# Tracks whose lengths differ by at most this many frames are truncated instead of resampled
TRUNCATION_SLACK = 2
MIN_JOINT_FRAMES = 3


@dataclass
class PitchCorrelation:
    """rho_F0 and the number of frames it was computed on"""
    value: float
    n_frames: int


def _cmnd(block: np.ndarray, window: int, max_lag: int) -> np.ndarray:
    """Cumulative mean normalized difference d'(tau) for tau = 0..max_lag"""
    head = block[:window]
    # r(tau) = sum_j x_j x_{j+tau} over the integration window
    cross = correlate(block[:window + max_lag], head, mode="valid", method="fft")[:max_lag + 1]
    energy = np.concatenate([[0.0], np.cumsum(block ** 2)])
    taus = np.arange(max_lag + 1)
    shifted_energy = energy[taus + window] - energy[taus]
    difference = np.maximum(energy[window] + shifted_energy - 2.0 * cross, 0.0)

    cmnd = np.ones(max_lag + 1)
    running = np.cumsum(difference[1:])
    nonzero = running > 0
    cmnd[1:][nonzero] = difference[1:][nonzero] * taus[1:][nonzero] / running[nonzero]
    return cmnd


def _pick_lag(cmnd: np.ndarray, lag_min: int, lag_max: int, threshold: float) -> float:
    """First dip below threshold in [lag_min, lag_max], refined by parabolic interpolation"""
    band = cmnd[lag_min:lag_max + 1]
    below = np.flatnonzero(band < threshold)
    if not below.size:
        return 0.0
    tau = lag_min + int(below[0])
    while tau + 1 <= lag_max and cmnd[tau + 1] < cmnd[tau]:
        tau += 1

    if 0 < tau < cmnd.size - 1:
        left, centre, right = cmnd[tau - 1], cmnd[tau], cmnd[tau + 1]
        curvature = left - 2.0 * centre + right
        if curvature > 0:
            return tau + 0.5 * (left - right) / curvature
    return float(tau)


def yin_f0(w: Waveform, cfg: PitchConfig = None, utterance_id: str = "") -> PitchTrack:
    """
    YIN fundamental frequency tracker

    Args:
        w: Input waveform, longer than one frame
        cfg: Pitch configuration
        utterance_id: Carried into the returned track

    Returns:
        PitchTrack with one estimate per hop; unvoiced frames carry f0 = 0
    """
    cfg = cfg or PitchConfig()
    cfg.check_sample_rate(w.sample_rate)
    rate = w.sample_rate
    window = w.ms_to_samples(cfg.frame_ms)
    hop = w.ms_to_samples(cfg.hop_ms)
    if hop <= 0 or window <= 0:
        raise InvalidParameterError(f"Frame settings too small for {rate} Hz")
    if len(w) < window:
        raise EmptyInputError(f"Waveform of {len(w)} samples is shorter than one {window}-sample frame")

    lag_min = max(2, int(math.floor(rate / cfg.f0_max)))
    lag_max = int(math.ceil(rate / cfg.f0_min))
    n_frames = math.ceil(len(w) / hop)
    blocks = slice_frames(w.samples, window + lag_max + 1, hop, n_frames)

    f0 = np.zeros(n_frames)
    for index, block in enumerate(blocks):
        if np.mean(block[:window] ** 2) < SILENCE_POWER:
            continue
        cmnd = _cmnd(block, window, lag_max + 1)
        lag = _pick_lag(cmnd, lag_min, lag_max, cfg.yin_threshold)
        if lag > 0:
            estimate = rate / lag
            if cfg.f0_min <= estimate <= cfg.f0_max:
                f0[index] = estimate

    if cfg.median_filter:
        f0 = _median_smooth(f0)
    return PitchTrack(f0=f0, voiced=f0 > 0, hop_ms=cfg.hop_ms, utterance_id=utterance_id)


def _median_smooth(f0: np.ndarray) -> np.ndarray:
    """3-frame median over voiced values; voicing decisions are kept"""
    if f0.size < 3:
        return f0
    smoothed = medfilt(f0, kernel_size=3)
    # Keep the raw value where the median would fall on an unvoiced neighbour
    return np.where((f0 > 0) & (smoothed > 0), smoothed, f0)


def _interpolate_gaps(track: PitchTrack) -> Tuple[np.ndarray, np.ndarray]:
    """Fill unvoiced gaps between the first and last voiced frames"""
    voiced = track.voiced
    indices = np.flatnonzero(voiced)
    if indices.size < 2:
        return track.f0.copy(), voiced.copy()
    frames = np.arange(len(track))
    inside = (frames >= indices[0]) & (frames <= indices[-1])
    values = np.where(inside, np.interp(frames, indices, track.f0[indices]), 0.0)
    return values, inside


def _align(values: np.ndarray, voiced: np.ndarray, length: int) -> Tuple[np.ndarray, np.ndarray]:
    """Linearly resample a track onto a grid of `length` frames"""
    if values.size == length:
        return values, voiced
    positions = np.linspace(0.0, values.size - 1, length)
    lower = np.floor(positions).astype(int)
    upper = np.minimum(lower + 1, values.size - 1)
    return np.interp(positions, np.arange(values.size), values), voiced[lower] & voiced[upper]


def pitch_correlation(
    orig: PitchTrack,
    anon: PitchTrack,
    interpolate_unvoiced: bool = False,
) -> PitchCorrelation:
    """
    Pearson correlation of two pitch tracks over jointly voiced frames

    Args:
        orig: Original utterance track
        anon: Anonymized utterance track (same hop)
        interpolate_unvoiced: Fill unvoiced gaps inside each track before intersecting

    Returns:
        PitchCorrelation with the coefficient and the frame count used
    """
    if not len(orig) or not len(anon):
        raise EmptyInputError("Pitch tracks must be non-empty")
    if not math.isclose(orig.hop_ms, anon.hop_ms):
        raise InvalidParameterError(f"Tracks use different hops: {orig.hop_ms} vs {anon.hop_ms} ms")

    if interpolate_unvoiced:
        a_values, a_voiced = _interpolate_gaps(orig)
        b_values, b_voiced = _interpolate_gaps(anon)
    else:
        a_values, a_voiced = orig.f0, orig.voiced
        b_values, b_voiced = anon.f0, anon.voiced

    length = min(a_values.size, b_values.size)
    if abs(a_values.size - b_values.size) <= TRUNCATION_SLACK:
        a_values, a_voiced = a_values[:length], a_voiced[:length]
        b_values, b_voiced = b_values[:length], b_voiced[:length]
    elif a_values.size > b_values.size:
        a_values, a_voiced = _align(a_values, a_voiced, length)
    else:
        b_values, b_voiced = _align(b_values, b_voiced, length)

    joint = a_voiced & b_voiced
    n_frames = int(np.count_nonzero(joint))
    if n_frames < MIN_JOINT_FRAMES:
        raise InsufficientOverlapError(f"Only {n_frames} jointly voiced frames (need {MIN_JOINT_FRAMES})")

    x = a_values[joint]
    y = b_values[joint]
    x = x - x.mean()
    y = y - y.mean()
    xx = float(np.dot(x, x))
    yy = float(np.dot(y, y))
    if xx == 0.0 or yy == 0.0:
        raise DegenerateInputError("Pitch sequence has zero variance over the joint frames")
    # sqrt(xx * yy) == xx exactly when x == y, so identical tracks give exactly 1.0
    value = float(np.clip(np.dot(x, y) / np.sqrt(xx * yy), -1.0, 1.0))
    return PitchCorrelation(value=value, n_frames=n_frames)
