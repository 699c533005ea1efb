"""
Audio I/O for VoiceGuard
RIFF/WAVE ingestion and emission, windowed-sinc resampling and framing
"""

import math
from pathlib import Path
from typing import Optional, Union

import numpy as np
import soundfile as sf
from loguru import logger
from scipy.signal import get_window

from backend.core.exceptions import (
    InvalidParameterError,
    UnsupportedFormatError,
    WavParseError,
    WavWriteError,
)
from backend.models.speech_models import FrameSequence, Waveform, WindowKind

PathLike = Union[str, Path]

SUPPORTED_SUBTYPES = ("PCM_16", "FLOAT")

# Resampler kernel: taps per output sample, Kaiser shape, cutoff relative to the lower Nyquist
RESAMPLER_TAPS = 64
RESAMPLER_KAISER_BETA = 8.6
RESAMPLER_CUTOFF = 0.9
RESAMPLER_CHUNK = 8192

# Standard deviation of the Gaussian window as a fraction of its length
GAUSSIAN_WINDOW_STD = 0.2


def read_wav(path: PathLike) -> Waveform:
    """
    Read a WAV file as a mono Waveform

    Args:
        path: RIFF/WAVE file, PCM 16-bit or 32-bit float, any channel count

    Returns:
        Waveform with channels averaged and amplitudes in [-1, 1]
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"WAV file not found: {path}")

    try:
        info = sf.info(str(path))
    except RuntimeError as e:
        raise WavParseError(f"Cannot parse WAV header of {path}: {e}") from e

    if info.format != "WAV":
        raise WavParseError(f"{path} is {info.format}, not RIFF/WAVE")
    if info.subtype not in SUPPORTED_SUBTYPES:
        raise UnsupportedFormatError(info.subtype, str(path))

    try:
        data, sample_rate = sf.read(str(path), dtype="float64", always_2d=True)
    except RuntimeError as e:
        raise WavParseError(f"Cannot read samples of {path}: {e}") from e

    samples = data.mean(axis=1) if data.shape[0] else np.zeros(0)
    peak = float(np.max(np.abs(samples))) if samples.size else 0.0
    if peak > 1.0:
        logger.warning(f"{path.name}: float samples peak at {peak:.3f}, normalizing to full scale")
        samples = samples / peak
    return Waveform(samples=samples, sample_rate=int(sample_rate))


def write_wav(w: Waveform, path: PathLike) -> None:
    """Write a Waveform as a 16-bit PCM mono file"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        sf.write(str(path), np.clip(w.samples, -1.0, 1.0), w.sample_rate, subtype="PCM_16", format="WAV")
    except (OSError, RuntimeError) as e:
        raise WavWriteError(f"Cannot write {path}: {e}") from e


def _kaiser(offsets: np.ndarray, half_width: float, beta: float) -> np.ndarray:
    ratio = np.clip(offsets / half_width, -1.0, 1.0)
    return np.i0(beta * np.sqrt(1.0 - ratio ** 2)) / np.i0(beta)


def resample(w: Waveform, target_rate: int) -> Waveform:
    """
    Band-limited resampling with a 64-tap Kaiser-windowed sinc kernel

    Args:
        w: Input waveform
        target_rate: Output sample rate (Hz)

    Returns:
        Waveform at target_rate; identical object content when the rates match
    """
    if isinstance(target_rate, bool) or int(target_rate) != target_rate or target_rate <= 0:
        raise InvalidParameterError(f"Target rate must be a positive integer, got {target_rate}")
    target_rate = int(target_rate)
    if target_rate == w.sample_rate:
        return Waveform(samples=w.samples, sample_rate=w.sample_rate)

    n_out = int(round(len(w) * target_rate / w.sample_rate))
    if n_out == 0:
        return Waveform(samples=np.zeros(0), sample_rate=target_rate)

    step = w.sample_rate / target_rate
    cutoff = RESAMPLER_CUTOFF * min(1.0, target_rate / w.sample_rate)
    half = RESAMPLER_TAPS // 2
    tap_offsets = np.arange(-half + 1, half + 1)

    padded = np.concatenate([np.zeros(half), w.samples, np.zeros(half + 1)])
    output = np.empty(n_out)
    for start in range(0, n_out, RESAMPLER_CHUNK):
        positions = np.arange(start, min(start + RESAMPLER_CHUNK, n_out)) * step
        base = np.floor(positions).astype(np.int64)
        taps = base[:, None] + tap_offsets[None, :]
        offsets = positions[:, None] - taps
        kernel = cutoff * np.sinc(cutoff * offsets) * _kaiser(offsets, half, RESAMPLER_KAISER_BETA)
        output[start:start + positions.size] = np.sum(kernel * padded[taps + half], axis=1)

    return Waveform(samples=np.clip(output, -1.0, 1.0), sample_rate=target_rate)


def make_window(kind: WindowKind, length: int) -> np.ndarray:
    """Analysis window of the given kind"""
    kind = WindowKind(kind)
    if kind == WindowKind.RECTANGULAR:
        return np.ones(length)
    if kind == WindowKind.HANN:
        return get_window("hann", length, fftbins=True)
    return get_window(("gaussian", GAUSSIAN_WINDOW_STD * length), length, fftbins=False)


def frame_signal(
    w: Waveform,
    frame_ms: float,
    hop_ms: float,
    window_kind: WindowKind = WindowKind.RECTANGULAR,
) -> FrameSequence:
    """
    Cut a waveform into ceil(len/hop) windowed frames

    Args:
        w: Input waveform
        frame_ms: Frame length (ms)
        hop_ms: Frame step (ms), at most frame_ms
        window_kind: Window applied multiplicatively to each frame

    Returns:
        FrameSequence; frame i starts at sample i*hop, the tail is zero-padded
    """
    if not frame_ms >= hop_ms > 0:
        raise InvalidParameterError(f"Need frame_ms >= hop_ms > 0, got {frame_ms}/{hop_ms}")
    frame_len = max(1, w.ms_to_samples(frame_ms))
    hop = max(1, min(frame_len, w.ms_to_samples(hop_ms)))
    frames = slice_frames(w.samples, frame_len, hop) * make_window(window_kind, frame_len)[None, :]
    return FrameSequence(
        frames=frames,
        frame_len=frame_len,
        hop=hop,
        window_kind=WindowKind(window_kind),
        sample_rate=w.sample_rate,
    )


def slice_frames(samples: np.ndarray, frame_len: int, hop: int, n_frames: Optional[int] = None) -> np.ndarray:
    """Unwindowed frames starting every hop samples, zero-padded at the tail"""
    if n_frames is None:
        n_frames = math.ceil(samples.size / hop)
    if n_frames <= 0:
        return np.zeros((0, frame_len))
    needed = (n_frames - 1) * hop + frame_len
    padded = np.zeros(max(needed, samples.size))
    padded[:samples.size] = samples
    view = np.lib.stride_tricks.sliding_window_view(padded, frame_len)[::hop]
    return np.array(view[:n_frames])


def overlap_add(frames: np.ndarray, hop: int, length: int) -> np.ndarray:
    """Overlap-add frames placed every hop samples, trimmed to length"""
    n_frames, frame_len = frames.shape if frames.size else (0, 0)
    output = np.zeros(max(length, (n_frames - 1) * hop + frame_len if n_frames else 0))
    for index in range(n_frames):
        start = index * hop
        output[start:start + frame_len] += frames[index]
    return output[:length]
