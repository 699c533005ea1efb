"""
Strategy Framework Module for VoiceGuard
Implements the formant and F0 scaling rules used for anonymization
"""

from .base_strategy import BaseScalingStrategy, ScaledFeatures, create_strategy, scale_tracks
from .gender_independent_strategy import GenderIndependentStrategy, scale_gender_independent
from .gender_dependent_strategy import GenderDependentStrategy, scale_gender_dependent

__all__ = [
    'BaseScalingStrategy',
    'ScaledFeatures',
    'create_strategy',
    'scale_tracks',
    'GenderIndependentStrategy',
    'scale_gender_independent',
    'GenderDependentStrategy',
    'scale_gender_dependent',
]
