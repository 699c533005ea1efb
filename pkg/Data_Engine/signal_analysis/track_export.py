"""
Track serialization for VoiceGuard
Pitch and formant tracks as pandas tables and CSV files
"""

from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from backend.models.speech_models import FormantTrack, PitchTrack

PathLike = Union[str, Path]


def pitch_track_to_frame(track: PitchTrack) -> pd.DataFrame:
    """Columns frame_index, time_s, f0_hz, voiced (0/1)"""
    return pd.DataFrame({
        'frame_index': np.arange(len(track)),
        'time_s': track.times(),
        'f0_hz': track.f0,
        'voiced': track.voiced.astype(int),
    })


def formant_track_to_frame(track: FormantTrack) -> pd.DataFrame:
    """Columns frame_index, time_s, f1, b1, ..., fN, bN; NaN for absent formants"""
    frequencies = track.frequencies_matrix()
    bandwidths = track.bandwidths_matrix()
    columns = {
        'frame_index': np.arange(len(track)),
        'time_s': np.arange(len(track)) * track.hop_ms / 1000.0,
    }
    for k in range(track.max_formants):
        columns[f'f{k + 1}'] = frequencies[:, k]
        columns[f'b{k + 1}'] = bandwidths[:, k]
    return pd.DataFrame(columns)


def write_pitch_csv(track: PitchTrack, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pitch_track_to_frame(track).to_csv(path, index=False, float_format='%.6f')
    return path


def write_formant_csv(track: FormantTrack, path: PathLike) -> Path:
    """Absent formants are written as empty cells"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    formant_track_to_frame(track).to_csv(path, index=False, float_format='%.6f', na_rep='')
    return path
