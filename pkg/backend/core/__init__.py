"""
Backend Core Module for VoiceGuard
Settings and the exception hierarchy
"""

from .config import Settings, get_settings
from .exceptions import (
    VoiceGuardError,
    WavParseError,
    UnsupportedFormatError,
    WavWriteError,
    InvalidParameterError,
    EmptyInputError,
    UnstablePredictorError,
    InsufficientOverlapError,
    DegenerateInputError,
    MissingGenderError,
    InsufficientSpeechError,
    DegenerateEmbeddingError,
    InsufficientTrialsError,
    MismatchedSpeakersError,
    UndefinedDominanceError,
    DegenerateReferenceError,
    ManifestError,
    MissingCounterpartError,
)

__all__ = [
    'Settings',
    'get_settings',
    'VoiceGuardError',
    'WavParseError',
    'UnsupportedFormatError',
    'WavWriteError',
    'InvalidParameterError',
    'EmptyInputError',
    'UnstablePredictorError',
    'InsufficientOverlapError',
    'DegenerateInputError',
    'MissingGenderError',
    'InsufficientSpeechError',
    'DegenerateEmbeddingError',
    'InsufficientTrialsError',
    'MismatchedSpeakersError',
    'UndefinedDominanceError',
    'DegenerateReferenceError',
    'ManifestError',
    'MissingCounterpartError',
]
