"""
Anonymization Engine Module for VoiceGuard
Source-filter resynthesis and the per-utterance anonymization pipeline
"""

from .vocoder import VocoderResult, WarpedEnvelope, warp_envelope, build_excitation, resynthesize, utterance_rng
from .anonymizer import AnonymizationReport, anonymize_utterance

__all__ = [
    'VocoderResult',
    'WarpedEnvelope',
    'warp_envelope',
    'build_excitation',
    'resynthesize',
    'utterance_rng',
    'AnonymizationReport',
    'anonymize_utterance',
]
