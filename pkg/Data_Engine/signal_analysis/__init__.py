"""
Signal Analysis Module for VoiceGuard
LPC kernels, YIN pitch tracking and LPC formant tracking
"""

from .lpc import LpcResult, lpc_burg, poly_roots
from .pitch import PitchCorrelation, yin_f0, pitch_correlation
from .formants import estimate_formants, pre_emphasis_coefficient, roots_to_formants
from .track_export import (
    pitch_track_to_frame,
    formant_track_to_frame,
    write_pitch_csv,
    write_formant_csv,
)

__all__ = [
    'LpcResult',
    'lpc_burg',
    'poly_roots',
    'PitchCorrelation',
    'yin_f0',
    'pitch_correlation',
    'estimate_formants',
    'pre_emphasis_coefficient',
    'roots_to_formants',
    'pitch_track_to_frame',
    'formant_track_to_frame',
    'write_pitch_csv',
    'write_formant_csv',
]
