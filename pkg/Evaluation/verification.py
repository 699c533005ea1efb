"""
Speaker verification scoring for VoiceGuard
Trial lists, trial scoring and the equal error rate
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional

import numpy as np
import pandas as pd

from backend.core.exceptions import InsufficientTrialsError, InvalidParameterError, ManifestError
from backend.models.speech_models import Embedding, Manifest
from .embeddings import cosine_score

TARGET = 'target'
NONTARGET = 'nontarget'


@dataclass
class TrialScores:
    """Labeled verification scores"""
    enroll_utts: List[str]
    test_utts: List[str]
    scores: np.ndarray
    is_target: np.ndarray

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        self.is_target = np.asarray(self.is_target, dtype=bool)
        n = len(self.enroll_utts)
        if not (len(self.test_utts) == n == self.scores.size == self.is_target.size):
            raise InvalidParameterError("Trial columns must have equal lengths")
        if not np.all(np.isfinite(self.scores)):
            raise InvalidParameterError("Trial scores must be finite")

    def __len__(self) -> int:
        return int(self.scores.size)

    @property
    def target_scores(self) -> np.ndarray:
        return self.scores[self.is_target]

    @property
    def nontarget_scores(self) -> np.ndarray:
        return self.scores[~self.is_target]

    @classmethod
    def from_scores(cls, targets, nontargets) -> "TrialScores":
        """Anonymous trials from two score lists"""
        targets = np.asarray(targets, dtype=np.float64)
        nontargets = np.asarray(nontargets, dtype=np.float64)
        n = targets.size + nontargets.size
        return cls(
            enroll_utts=[''] * n,
            test_utts=[''] * n,
            scores=np.concatenate([targets, nontargets]),
            is_target=np.concatenate([np.ones(targets.size, bool), np.zeros(nontargets.size, bool)]),
        )

    def subset(self, mask: np.ndarray) -> "TrialScores":
        index = np.flatnonzero(mask)
        return TrialScores(
            enroll_utts=[self.enroll_utts[i] for i in index],
            test_utts=[self.test_utts[i] for i in index],
            scores=self.scores[index],
            is_target=self.is_target[index],
        )

    def to_frame(self) -> pd.DataFrame:
        """Columns enroll_utt, test_utt, label, score"""
        return pd.DataFrame({
            'enroll_utt': self.enroll_utts,
            'test_utt': self.test_utts,
            'label': np.where(self.is_target, TARGET, NONTARGET),
            'score': self.scores,
        })


@dataclass
class EerResult:
    """Equal error rate, its threshold and the raw operating points"""
    eer_pct: float
    threshold: float
    det_points: pd.DataFrame
    eer_sweep_pct: Optional[float] = None

    def to_dict(self) -> Dict[str, float]:
        return {'eer_pct': self.eer_pct, 'threshold': self.threshold, 'eer_sweep_pct': self.eer_sweep_pct}


def operating_points(trials: TrialScores) -> pd.DataFrame:
    """
    False acceptance and false rejection rates at every unique score

    Args:
        trials: Scored trials; a trial is accepted when score >= threshold

    Returns:
        DataFrame with threshold, far, frr sorted by threshold, bracketed by
        -inf (accept all) and +inf (reject all)
    """
    targets = np.sort(trials.target_scores)
    nontargets = np.sort(trials.nontarget_scores)
    thresholds = np.concatenate([[-np.inf], np.unique(trials.scores), [np.inf]])
    # searchsorted(..., 'left') counts scores strictly below the threshold
    frr = np.searchsorted(targets, thresholds, side='left') / targets.size
    far = 1.0 - np.searchsorted(nontargets, thresholds, side='left') / nontargets.size
    return pd.DataFrame({'threshold': thresholds, 'far': far, 'frr': frr})


def _lower_hull(points: pd.DataFrame) -> pd.DataFrame:
    """Lower convex hull of (far, frr) points, ordered by far"""
    ordered = points.sort_values(['far', 'frr'], kind='mergesort').reset_index(drop=True)
    x = ordered['far'].to_numpy()
    y = ordered['frr'].to_numpy()
    hull: List[int] = []
    for i in range(len(ordered)):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o])
            if cross > 0:
                break
            hull.pop()
        hull.append(i)
    return ordered.iloc[hull].reset_index(drop=True)


def _interpolate_threshold(left: float, right: float, weight: float) -> float:
    if np.isfinite(left) and np.isfinite(right):
        return float(left + weight * (right - left))
    if np.isfinite(left):
        return float(left)
    if np.isfinite(right):
        return float(right)
    return 0.0


def sweep_eer(points: pd.DataFrame) -> float:
    """
    Equal error rate of the plain threshold sweep, in [0, 1]

    Walks the operating points in threshold order and interpolates linearly between
    the last point with frr < far and the first with frr >= far. Not capped: a
    verifier that scores impostors above targets reaches 1.
    """
    far = points['far'].to_numpy()
    frr = points['frr'].to_numpy()
    gap = frr - far  # non-decreasing in threshold order
    crossing = int(np.flatnonzero(gap >= 0)[0])
    if gap[crossing] == 0 or crossing == 0:
        return float(far[crossing])
    previous = crossing - 1
    weight = gap[previous] / (gap[previous] - gap[crossing])
    return float(far[previous] + weight * (far[crossing] - far[previous]))


def compute_eer(trials: TrialScores) -> EerResult:
    """
    Equal error rate on the convex hull of the operating points (ROCCH)

    The hull lets the verifier mix two neighbouring thresholds, so the EER never
    exceeds 50%: a verifier that does worse than chance can flip its decisions.
    eer_sweep_pct carries the uncapped value of the plain threshold sweep, which
    reaches 100% for fully inverted scores.

    Args:
        trials: At least one target and one nontarget trial

    Returns:
        EerResult with EER in percent, the interpolated crossing threshold,
        the finite operating points and the plain sweep EER in percent
    """
    if not trials.target_scores.size or not trials.nontarget_scores.size:
        raise InsufficientTrialsError(
            f"EER needs target and nontarget trials, got {trials.target_scores.size} "
            f"targets and {trials.nontarget_scores.size} nontargets"
        )
    points = operating_points(trials)
    hull = _lower_hull(points)
    far = hull['far'].to_numpy()
    frr = hull['frr'].to_numpy()
    thresholds = hull['threshold'].to_numpy()
    gap = frr - far  # strictly decreasing along the hull

    crossing = int(np.flatnonzero(gap <= 0)[0])
    if gap[crossing] == 0 or crossing == 0:
        eer = far[crossing]
        threshold = _interpolate_threshold(thresholds[crossing], thresholds[crossing], 0.0)
    else:
        previous = crossing - 1
        weight = gap[previous] / (gap[previous] - gap[crossing])
        eer = far[previous] + weight * (far[crossing] - far[previous])
        threshold = _interpolate_threshold(thresholds[previous], thresholds[crossing], weight)

    finite = points[np.isfinite(points['threshold'])].reset_index(drop=True)
    return EerResult(
        eer_pct=float(100.0 * eer),
        threshold=threshold,
        det_points=finite,
        eer_sweep_pct=100.0 * sweep_eer(points),
    )


def build_trials(manifest: Manifest) -> pd.DataFrame:
    """
    Default trial list: the first utterance of each speaker enrolls, every other
    utterance of the corpus is tested against it

    Args:
        manifest: Corpus listing

    Returns:
        DataFrame enroll_utt, test_utt, label
    """
    enrollments: Dict[str, str] = {}
    for row in manifest:
        enrollments.setdefault(row.speaker_id, row.utterance_id)

    records = []
    for speaker, enroll in enrollments.items():
        for row in manifest:
            if row.utterance_id == enroll:
                continue
            records.append({
                'enroll_utt': enroll,
                'test_utt': row.utterance_id,
                'label': TARGET if row.speaker_id == speaker else NONTARGET,
            })
    return pd.DataFrame(records, columns=['enroll_utt', 'test_utt', 'label'])


def score_trials(
    trials: pd.DataFrame,
    enroll_embeddings: Mapping[str, Embedding],
    test_embeddings: Mapping[str, Embedding],
    skip_missing: bool = False,
) -> TrialScores:
    """
    Cosine-score every trial

    Args:
        trials: enroll_utt, test_utt, label
        enroll_embeddings: Enrollment-side embeddings by utterance id
        test_embeddings: Test-side embeddings by utterance id
        skip_missing: Drop trials whose embeddings are unavailable instead of raising

    Returns:
        TrialScores in trial-list order
    """
    enroll_utts: List[str] = []
    test_utts: List[str] = []
    scores: List[float] = []
    labels: List[bool] = []
    missing: List[str] = []
    for enroll, test, label in trials[['enroll_utt', 'test_utt', 'label']].itertuples(index=False):
        a: Optional[Embedding] = enroll_embeddings.get(enroll)
        b: Optional[Embedding] = test_embeddings.get(test)
        if a is None or b is None:
            missing.append(enroll if a is None else test)
            continue
        enroll_utts.append(enroll)
        test_utts.append(test)
        scores.append(cosine_score(a, b))
        labels.append(label == TARGET)
    if missing and not skip_missing:
        raise ManifestError(f"Trials reference utterances without embeddings: {sorted(set(missing))[:10]}")
    return TrialScores(enroll_utts, test_utts, np.asarray(scores), np.asarray(labels, dtype=bool))
