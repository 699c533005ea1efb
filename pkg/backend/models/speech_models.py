"""
Core speech data models for VoiceGuard
All models use dataclasses; arrays are made read-only after validation
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from backend.core.exceptions import InvalidParameterError, ManifestError

# Tolerance for amplitude checks on already-normalized signals
AMPLITUDE_TOLERANCE = 1e-9


class Gender(str, Enum):
    """Speaker gender label"""
    MALE = "male"
    FEMALE = "female"
    UNKNOWN = "unknown"

    @classmethod
    def from_label(cls, label: Optional[str]) -> "Gender":
        """Parse manifest labels (M/F/U) as well as full names"""
        if isinstance(label, cls):
            return label
        if label is None:
            return cls.UNKNOWN
        value = str(label).strip().lower()
        aliases = {
            "m": cls.MALE, "male": cls.MALE,
            "f": cls.FEMALE, "female": cls.FEMALE,
            "u": cls.UNKNOWN, "unknown": cls.UNKNOWN, "": cls.UNKNOWN, "nan": cls.UNKNOWN,
        }
        if value not in aliases:
            raise InvalidParameterError(f"Unknown gender label '{label}'")
        return aliases[value]

    @property
    def short(self) -> str:
        """One-letter manifest code"""
        return {"male": "M", "female": "F", "unknown": "U"}[self.value]


class StrategyType(str, Enum):
    """Anonymization scaling strategy"""
    GENDER_INDEPENDENT = "gender_independent"
    GENDER_DEPENDENT = "gender_dependent"

    @classmethod
    def parse(cls, name: str) -> "StrategyType":
        """Accept both CLI (dashed) and config (underscored) spellings"""
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower().replace("-", "_"))
        except ValueError:
            raise InvalidParameterError(
                f"Unknown strategy '{name}'. Must be one of {[s.value for s in cls]}"
            ) from None


class WindowKind(str, Enum):
    """Analysis window shape"""
    RECTANGULAR = "rectangular"
    HANN = "hann"
    GAUSSIAN = "gaussian"


class Condition(str, Enum):
    """Corpus condition pair of a similarity matrix"""
    OO = "OO"
    OA = "OA"
    AA = "AA"

    @property
    def is_symmetric(self) -> bool:
        return self in (Condition.OO, Condition.AA)


def _readonly(values: Any, dtype=np.float64) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Waveform:
    """Mono PCM signal in [-1, 1] with its sample rate"""
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        """Validate waveform"""
        samples = _readonly(np.ravel(self.samples))
        if isinstance(self.sample_rate, bool) or int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise InvalidParameterError(f"Sample rate must be a positive integer, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise InvalidParameterError("Waveform samples must be finite")
        if samples.size and np.max(np.abs(samples)) > 1.0 + AMPLITUDE_TOLERANCE:
            raise InvalidParameterError(
                f"Waveform amplitude must be within [-1, 1], peak is {np.max(np.abs(samples)):.6f}"
            )
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration(self) -> float:
        """Duration in seconds"""
        return len(self) / self.sample_rate

    @property
    def rms_dbfs(self) -> float:
        """Overall level relative to a full-scale square wave"""
        if not len(self):
            return float("-inf")
        power = float(np.mean(self.samples ** 2))
        return 10.0 * np.log10(power) if power > 0 else float("-inf")

    def with_samples(self, samples: np.ndarray) -> "Waveform":
        """Same rate, new samples"""
        return Waveform(samples=samples, sample_rate=self.sample_rate)

    def ms_to_samples(self, milliseconds: float) -> int:
        return int(round(milliseconds * self.sample_rate / 1000.0))


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Fixed-length (optionally windowed) frames cut from a waveform"""
    frames: np.ndarray  # shape (n_frames, frame_len)
    frame_len: int
    hop: int
    window_kind: WindowKind
    sample_rate: int

    def __post_init__(self):
        frames = _readonly(self.frames).reshape(-1, self.frame_len)
        if self.hop <= 0 or self.frame_len < self.hop:
            raise InvalidParameterError(f"Need frame_len >= hop > 0, got {self.frame_len}/{self.hop}")
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return int(self.frames.shape[0])


@dataclass(frozen=True, eq=False)
class PitchTrack:
    """Per-frame F0 in Hz (0 where unvoiced)"""
    f0: np.ndarray
    voiced: np.ndarray
    hop_ms: float
    utterance_id: str = ""

    def __post_init__(self):
        """Validate track"""
        f0 = _readonly(self.f0)
        voiced = _readonly(self.voiced, dtype=bool)
        if f0.shape != voiced.shape:
            raise InvalidParameterError(f"f0 and voiced lengths differ: {f0.size} vs {voiced.size}")
        if self.hop_ms <= 0:
            raise InvalidParameterError(f"hop_ms must be positive, got {self.hop_ms}")
        if not np.array_equal(f0 > 0, voiced):
            raise InvalidParameterError("f0 must be positive exactly on voiced frames")
        object.__setattr__(self, "f0", f0)
        object.__setattr__(self, "voiced", voiced)

    def __len__(self) -> int:
        return int(self.f0.size)

    @property
    def n_voiced(self) -> int:
        return int(np.count_nonzero(self.voiced))

    @property
    def voiced_indices(self) -> List[int]:
        return [int(i) for i in np.flatnonzero(self.voiced)]

    def times(self) -> np.ndarray:
        """Frame start times in seconds"""
        return np.arange(len(self)) * self.hop_ms / 1000.0

    def mean_voiced_f0(self) -> Optional[float]:
        if not self.n_voiced:
            return None
        return float(np.mean(self.f0[self.voiced]))

    def median_voiced_f0(self) -> Optional[float]:
        if not self.n_voiced:
            return None
        return float(np.median(self.f0[self.voiced]))


@dataclass(frozen=True)
class FormantFrame:
    """Formants of one frame as (frequency, bandwidth) pairs, ascending"""
    formants: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        pairs = tuple((float(f), float(b)) for f, b in self.formants)
        frequencies = [f for f, _ in pairs]
        if any(b <= 0 for _, b in pairs):
            raise InvalidParameterError(f"Formant bandwidths must be positive: {pairs}")
        if any(later <= earlier for earlier, later in zip(frequencies, frequencies[1:])):
            raise InvalidParameterError(f"Formant frequencies must be strictly ascending: {frequencies}")
        object.__setattr__(self, "formants", pairs)

    def __len__(self) -> int:
        return len(self.formants)

    @property
    def frequencies(self) -> List[float]:
        return [f for f, _ in self.formants]

    @property
    def bandwidths(self) -> List[float]:
        return [b for _, b in self.formants]


@dataclass(frozen=True)
class FormantTrack:
    """Per-frame F1-F5 estimates"""
    frames: Tuple[FormantFrame, ...]
    hop_ms: float
    ceiling_hz: float
    max_formants: int = 5
    utterance_id: str = ""

    def __post_init__(self):
        """Validate track"""
        frames = tuple(self.frames)
        for index, frame in enumerate(frames):
            if len(frame) > self.max_formants:
                raise InvalidParameterError(f"Frame {index} has {len(frame)} formants (> {self.max_formants})")
            if frame.formants and not (50.0 < frame.frequencies[0] and frame.frequencies[-1] < self.ceiling_hz):
                raise InvalidParameterError(
                    f"Frame {index} formants {frame.frequencies} outside (50, {self.ceiling_hz}) Hz"
                )
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    def frequencies_matrix(self) -> np.ndarray:
        """n_frames x max_formants matrix, NaN where a formant is absent"""
        matrix = np.full((len(self), self.max_formants), np.nan)
        for index, frame in enumerate(self.frames):
            matrix[index, :len(frame)] = frame.frequencies
        return matrix

    def bandwidths_matrix(self) -> np.ndarray:
        matrix = np.full((len(self), self.max_formants), np.nan)
        for index, frame in enumerate(self.frames):
            matrix[index, :len(frame)] = frame.bandwidths
        return matrix

    def median_formant(self, k: int) -> Optional[float]:
        """Median of the k-th formant (1-based) over frames where present"""
        column = self.frequencies_matrix()[:, k - 1]
        column = column[np.isfinite(column)]
        return float(np.median(column)) if column.size else None


@dataclass(frozen=True, eq=False)
class Embedding:
    """Utterance-level speaker feature vector"""
    vector: np.ndarray
    utterance_id: str
    speaker_id: str

    def __post_init__(self):
        vector = _readonly(np.ravel(self.vector))
        if not np.all(np.isfinite(vector)):
            raise InvalidParameterError(f"Embedding of {self.utterance_id} has non-finite entries")
        object.__setattr__(self, "vector", vector)

    @property
    def dimension(self) -> int:
        return int(self.vector.size)


@dataclass
class ManifestRow:
    """One corpus utterance"""
    utterance_id: str
    speaker_id: str
    gender: Gender
    wav_path: str

    def to_dict(self) -> Dict[str, str]:
        return {
            'utterance_id': self.utterance_id,
            'speaker_id': self.speaker_id,
            'gender': self.gender.short,
            'wav_path': self.wav_path,
        }


@dataclass
class Manifest:
    """Ordered corpus listing"""
    rows: List[ManifestRow] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            if row.utterance_id in seen:
                raise ManifestError(f"Duplicate utterance_id '{row.utterance_id}'")
            seen.add(row.utterance_id)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def utterance_ids(self) -> List[str]:
        return [row.utterance_id for row in self.rows]

    @property
    def speakers(self) -> List[str]:
        """Speaker ids in first-appearance order"""
        return list(dict.fromkeys(row.speaker_id for row in self.rows))

    def by_id(self) -> Dict[str, ManifestRow]:
        return {row.utterance_id: row for row in self.rows}

    def speaker_gender(self) -> Dict[str, Gender]:
        return {row.speaker_id: row.gender for row in self.rows}
