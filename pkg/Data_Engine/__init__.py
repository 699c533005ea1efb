"""
Data Engine Module for VoiceGuard
Handles audio I/O, corpus manifests, the synthetic desk corpus and signal analysis
"""

from .audio_io import read_wav, write_wav, resample, frame_signal, make_window, overlap_add
from .manifest import load_manifest, write_manifest, load_trials, write_trials
from .desk_corpus import generate_corpus, make_speaker, synthesize_utterance, SpeakerProfile

__all__ = [
    'read_wav',
    'write_wav',
    'resample',
    'frame_signal',
    'make_window',
    'overlap_add',
    'load_manifest',
    'write_manifest',
    'load_trials',
    'write_trials',
    'generate_corpus',
    'make_speaker',
    'synthesize_utterance',
    'SpeakerProfile',
]
