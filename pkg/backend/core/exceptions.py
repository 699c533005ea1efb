"""
Exception hierarchy for VoiceGuard
Every domain failure derives from VoiceGuardError so batch runners can isolate it per utterance
"""

from typing import Iterable


class VoiceGuardError(Exception):
    """Base class for all VoiceGuard errors"""


# Audio I/O

class WavParseError(VoiceGuardError, ValueError):
    """RIFF/WAVE header could not be parsed"""


class UnsupportedFormatError(VoiceGuardError, ValueError):
    """WAV file uses an encoding other than PCM 16-bit or 32-bit float"""

    def __init__(self, encoding: str, path: str = ""):
        self.encoding = encoding
        self.path = path
        where = f" in {path}" if path else ""
        super().__init__(f"Unsupported WAV encoding '{encoding}'{where}; expected PCM_16 or FLOAT")


class WavWriteError(VoiceGuardError, OSError):
    """Output WAV could not be written"""


# Parameters and inputs

class InvalidParameterError(VoiceGuardError, ValueError):
    """A numeric parameter or configuration value is out of range"""


class EmptyInputError(VoiceGuardError, ValueError):
    """Input is shorter than the minimum analysis length"""


class UnstablePredictorError(VoiceGuardError, ArithmeticError):
    """LPC predictor is not minimum phase (a reflection coefficient reached 1)"""


# Pitch

class InsufficientOverlapError(VoiceGuardError, ValueError):
    """Fewer than three jointly voiced frames"""


class DegenerateInputError(VoiceGuardError, ValueError):
    """A sequence has zero variance"""


# Anonymization

class MissingGenderError(VoiceGuardError, ValueError):
    """Gender-dependent scaling requires a male or female label"""


# Metrics

class InsufficientSpeechError(VoiceGuardError, ValueError):
    """Too few active frames to build a speaker embedding"""


class DegenerateEmbeddingError(VoiceGuardError, ValueError):
    """Embedding has zero norm"""


class InsufficientTrialsError(VoiceGuardError, ValueError):
    """EER needs at least one target and one nontarget trial"""


class MismatchedSpeakersError(VoiceGuardError, ValueError):
    """Compared conditions do not cover the same speakers"""

    def __init__(self, left: Iterable[str], right: Iterable[str]):
        self.only_left = sorted(set(left) - set(right))
        self.only_right = sorted(set(right) - set(left))
        super().__init__(
            f"Speaker sets differ: only in first condition {self.only_left}, "
            f"only in second condition {self.only_right}"
        )


class UndefinedDominanceError(VoiceGuardError, ValueError):
    """Diagonal dominance needs at least two speakers"""


class DegenerateReferenceError(VoiceGuardError, ValueError):
    """Reference diagonal dominance is zero, G_vd undefined"""


# Batch processing

class ManifestError(VoiceGuardError, ValueError):
    """Manifest is malformed or references missing files"""


class MissingCounterpartError(VoiceGuardError, ValueError):
    """Anonymized directory lacks files for some manifest utterances"""

    def __init__(self, missing_ids: Iterable[str]):
        self.missing_ids = sorted(missing_ids)
        preview = ", ".join(self.missing_ids[:10])
        more = f" (+{len(self.missing_ids) - 10} more)" if len(self.missing_ids) > 10 else ""
        super().__init__(f"Missing anonymized counterparts for: {preview}{more}")
