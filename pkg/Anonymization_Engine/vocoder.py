"""
Source-filter vocoder for VoiceGuard
LPC analysis, pole-angle envelope warping and pulse/noise resynthesis with overlap-add
"""

import math
import zlib
from dataclasses import dataclass
import numpy as np
from scipy.signal import get_window, lfilter

from backend.config import SynthesisConfig
from backend.core.exceptions import EmptyInputError, InvalidParameterError
from backend.models.speech_models import PitchTrack, Waveform
from Data_Engine.audio_io import overlap_add
from Data_Engine.signal_analysis.formants import pre_emphasis_coefficient
from Data_Engine.signal_analysis.lpc import lpc_burg, poly_roots

# Roots closer than this to the real axis are treated as real poles and never warped
REAL_ROOT_TOLERANCE = 1e-9
OUTPUT_PEAK = 0.99


@dataclass
class VocoderResult:
    """Synthesized waveform and the pole bookkeeping of the warp"""
    waveform: Waveform
    n_frames: int
    pole_clamp_count: int = 0
    unstable_pole_count: int = 0
    peak_normalized: bool = False


@dataclass
class WarpedEnvelope:
    """All-pole denominator after warping plus clamp counters"""
    denominator: np.ndarray
    clamped: int
    unstable: int


def warp_envelope(
    polynomial: np.ndarray,
    factor: float,
    cfg: SynthesisConfig,
) -> WarpedEnvelope:
    """
    Multiply the angle of every complex pole of A(z) by factor

    Args:
        polynomial: A(z) coefficients [1, a1, ..., ap]
        factor: Frequency-axis warp factor
        cfg: Nyquist guard, damped radius and stability clamp

    Returns:
        WarpedEnvelope; angles at or above guard*pi are pinned there with the damped
        radius, radii at or above 1 are pulled in to max_pole_radius
    """
    if not factor > 0:
        raise InvalidParameterError(f"Warp factor must be positive, got {factor}")
    roots = poly_roots(polynomial)
    upper = roots[roots.imag > REAL_ROOT_TOLERANCE]
    real = roots[np.abs(roots.imag) <= REAL_ROOT_TOLERANCE].real

    radius = np.abs(upper)
    angle = np.angle(upper) * factor
    limit = cfg.nyquist_guard * math.pi
    over = angle >= limit
    angle = np.where(over, limit, angle)
    radius = np.where(over, cfg.damped_radius, radius)

    unstable = radius >= 1.0
    radius = np.where(unstable, cfg.max_pole_radius, radius)
    real_unstable = np.abs(real) >= 1.0
    real = np.where(real_unstable, np.sign(real) * cfg.max_pole_radius, real)

    warped = radius * np.exp(1j * angle)
    poles = np.concatenate([warped, np.conj(warped), real.astype(complex)])
    return WarpedEnvelope(
        denominator=np.real(np.poly(poles)),
        clamped=int(np.count_nonzero(over)),
        unstable=int(np.count_nonzero(unstable) + np.count_nonzero(real_unstable)),
    )


def _track_index(centre: float, analysis_len: int, hop: int, n_frames: int) -> int:
    """Analysis frame whose centre is nearest to a sample position"""
    index = int(round((centre - analysis_len / 2.0) / hop))
    return min(max(index, 0), n_frames - 1)


def build_excitation(
    f0: PitchTrack,
    n_samples: int,
    hop: int,
    analysis_len: int,
    sample_rate: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Pulse train on voiced hops and unit-variance noise on unvoiced hops

    Args:
        f0: Target pitch track (already scaled)
        n_samples: Excitation length; sample 0 is one hop before the signal start
        hop: Segment length in samples (the pitch hop)
        analysis_len: Pitch analysis frame length in samples
        sample_rate: Output rate
        rng: Generator for the unvoiced segments

    Returns:
        Excitation with unit mean power; pulse phase is continuous across segments
    """
    excitation = np.zeros(n_samples)
    phase = 0.0
    for start in range(0, n_samples, hop):
        length = min(hop, n_samples - start)
        # Segment centre in signal coordinates (the excitation is shifted by one hop)
        centre = start - hop + length / 2.0
        frame = _track_index(centre, analysis_len, hop, len(f0))
        frequency = float(f0.f0[frame])
        if frequency > 0:
            cycles = phase + np.arange(1, length + 1) * frequency / sample_rate
            wraps = np.floor(cycles) > np.floor(np.concatenate([[phase], cycles[:-1]]))
            excitation[start:start + length][wraps] = math.sqrt(sample_rate / frequency)
            phase = float(cycles[-1] - math.floor(cycles[-1]))
        else:
            excitation[start:start + length] = rng.standard_normal(length)
    return excitation


def resynthesize(
    w: Waveform,
    f0: PitchTrack,
    envelope_warp: np.ndarray,
    cfg: SynthesisConfig,
    rng: np.random.Generator,
    analysis_frame_ms: float = 25.0,
) -> VocoderResult:
    """
    Re-synthesize a waveform with a warped LPC envelope and a new excitation

    Args:
        w: Source waveform
        f0: Target pitch track on the pitch hop grid
        envelope_warp: Per-frame warp factor on the same grid
        cfg: Synthesis settings
        rng: Generator for unvoiced excitation
        analysis_frame_ms: Pitch analysis frame length, used to align frames

    Returns:
        VocoderResult whose waveform has exactly len(w) samples
    """
    rate = w.sample_rate
    hop = w.ms_to_samples(f0.hop_ms)
    frame_len = 2 * hop
    analysis_len = w.ms_to_samples(analysis_frame_ms)
    if hop <= 0 or len(f0) == 0:
        raise EmptyInputError("Pitch track is empty")
    if len(w) < frame_len:
        raise EmptyInputError(f"Waveform of {len(w)} samples is shorter than one synthesis frame")

    order = cfg.order_for(rate)
    emphasis = pre_emphasis_coefficient(cfg.pre_emphasis_hz, rate)
    window = get_window("hann", frame_len, fftbins=True)
    window_power = float(np.sum(window ** 2))

    # Frame k covers padded samples [k*hop, k*hop + 2*hop), i.e. source [(k-1)*hop, (k+1)*hop)
    n_frames = math.ceil(len(w) / hop) + 1
    padded_len = (n_frames + 1) * hop
    source = np.zeros(padded_len)
    source[hop:hop + len(w)] = lfilter([1.0, -emphasis], [1.0], w.samples)

    excitation = np.concatenate([np.zeros(hop), build_excitation(f0, padded_len, hop, analysis_len, rate, rng)])
    shaped_frames = np.zeros((n_frames, frame_len))
    clamped = 0
    unstable = 0

    for k in range(n_frames):
        start = k * hop
        segment = source[start:start + frame_len] * window
        fit = lpc_burg(segment, order)
        if fit.zero_energy:
            continue
        residual = lfilter(fit.polynomial, [1.0], segment)
        gain = math.sqrt(float(np.sum(residual ** 2)) / window_power)
        if gain == 0.0:
            continue

        factor = float(envelope_warp[_track_index(start, analysis_len, hop, len(envelope_warp))])
        envelope = warp_envelope(fit.polynomial, factor, cfg)
        clamped += envelope.clamped
        unstable += envelope.unstable

        # One hop of excitation history warms the filter up; excitation index is shifted by one hop
        drive = excitation[start:start + frame_len + hop]
        shaped = lfilter([gain], envelope.denominator, drive)[hop:]
        shaped_frames[k] = shaped * window

    output = overlap_add(shaped_frames, hop, padded_len)
    samples = lfilter([1.0], [1.0, -emphasis], output)[hop:hop + len(w)]
    peak = float(np.max(np.abs(samples))) if samples.size else 0.0
    peak_normalized = peak > 1.0
    if peak_normalized:
        samples = samples * (OUTPUT_PEAK / peak)
    return VocoderResult(
        waveform=w.with_samples(samples),
        n_frames=n_frames,
        pole_clamp_count=clamped,
        unstable_pole_count=unstable,
        peak_normalized=peak_normalized,
    )


def utterance_rng(seed: int, utterance_id: str) -> np.random.Generator:
    """Generator seeded from (seed, CRC-32 of utterance_id)"""
    key = zlib.crc32(utterance_id.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(seed), key]))
