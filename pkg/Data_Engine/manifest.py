"""
Corpus manifests for VoiceGuard
Loads and writes the utterance listing and the verification trial list
"""

from pathlib import Path
from typing import Iterable, Union

import pandas as pd
from loguru import logger

from backend.core.exceptions import InvalidParameterError, ManifestError
from backend.models.speech_models import Gender, Manifest, ManifestRow

PathLike = Union[str, Path]

MANIFEST_COLUMNS = ['utterance_id', 'speaker_id', 'gender', 'wav_path']
TRIAL_COLUMNS = ['enroll_utt', 'test_utt', 'label']
TRIAL_LABELS = ('target', 'nontarget')


def _read_csv(path: Path, columns: Iterable[str], kind: str) -> pd.DataFrame:
    if not path.exists():
        raise ManifestError(f"{kind} file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ManifestError(f"Cannot parse {kind.lower()} {path}: {e}") from e
    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise ManifestError(f"{kind} {path} lacks columns {missing}; expected {list(columns)}")
    return frame


def load_manifest(
    path: PathLike,
    resolve_paths: bool = True,
    require_gender: bool = False,
) -> Manifest:
    """
    Load a manifest CSV with columns utterance_id,speaker_id,gender,wav_path

    Args:
        path: Manifest file; relative wav paths resolve against its directory
        resolve_paths: Check that every wav_path exists
        require_gender: Reject rows whose gender is U (gender-dependent runs)

    Returns:
        Manifest with absolute wav paths
    """
    path = Path(path)
    frame = _read_csv(path, MANIFEST_COLUMNS, "Manifest")
    base = path.parent

    rows = []
    for position, record in enumerate(frame.to_dict('records'), start=2):
        utterance_id = record['utterance_id'].strip()
        speaker_id = record['speaker_id'].strip()
        if not utterance_id or not speaker_id:
            raise ManifestError(f"{path}:{position}: empty utterance_id or speaker_id")
        try:
            gender = Gender.from_label(record['gender'])
        except InvalidParameterError as e:
            raise ManifestError(f"{path}:{position}: {e}") from e
        if require_gender and gender == Gender.UNKNOWN:
            raise ManifestError(f"{path}:{position}: utterance '{utterance_id}' has no gender label")

        wav_path = Path(record['wav_path'].strip())
        if not wav_path.is_absolute():
            wav_path = base / wav_path
        if resolve_paths and not wav_path.exists():
            raise ManifestError(f"{path}:{position}: wav_path {wav_path} does not exist")
        rows.append(ManifestRow(utterance_id, speaker_id, gender, str(wav_path)))

    manifest = Manifest(rows)
    if not len(manifest):
        logger.warning(f"Manifest {path} is empty")
    return manifest


def write_manifest(manifest: Manifest, path: PathLike, relative_to: PathLike = None) -> Path:
    """Write a manifest CSV; wav paths are made relative to `relative_to` when given"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records = []
    for row in manifest:
        record = row.to_dict()
        if relative_to is not None:
            try:
                record['wav_path'] = str(Path(row.wav_path).relative_to(Path(relative_to)))
            except ValueError:
                pass
        records.append(record)
    pd.DataFrame(records, columns=MANIFEST_COLUMNS).to_csv(path, index=False)
    return path


def load_trials(path: PathLike) -> pd.DataFrame:
    """Trial list CSV enroll_utt,test_utt,label with label in {target, nontarget}"""
    path = Path(path)
    frame = _read_csv(path, TRIAL_COLUMNS, "Trials")[TRIAL_COLUMNS].copy()
    frame['label'] = frame['label'].str.strip().str.lower()
    bad = sorted(set(frame['label']) - set(TRIAL_LABELS))
    if bad:
        raise ManifestError(f"Trials {path} has unknown labels {bad}")
    return frame.reset_index(drop=True)


def write_trials(trials: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trials[TRIAL_COLUMNS].to_csv(path, index=False)
    return path
