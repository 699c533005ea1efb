"""
Data models for VoiceGuard
"""

from .speech_models import (
    Gender,
    StrategyType,
    WindowKind,
    Condition,
    Waveform,
    FrameSequence,
    PitchTrack,
    FormantFrame,
    FormantTrack,
    Embedding,
    ManifestRow,
    Manifest,
)

__all__ = [
    'Gender',
    'StrategyType',
    'WindowKind',
    'Condition',
    'Waveform',
    'FrameSequence',
    'PitchTrack',
    'FormantFrame',
    'FormantTrack',
    'Embedding',
    'ManifestRow',
    'Manifest',
]
