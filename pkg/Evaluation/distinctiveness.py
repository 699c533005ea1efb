"""
Voice distinctiveness metrics for VoiceGuard
Speaker similarity matrices, diagonal dominance and the gain of voice distinctiveness
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence

import numpy as np

from backend.core.exceptions import (
    DegenerateReferenceError,
    InvalidParameterError,
    MismatchedSpeakersError,
    UndefinedDominanceError,
)
from backend.models.speech_models import Condition, Embedding
from .embeddings import normalized_matrix

SYMMETRY_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Speaker-by-speaker mean cosine scores between two corpus conditions"""
    matrix: np.ndarray
    speakers: List[str]
    condition: Condition

    def __post_init__(self):
        """Validate matrix"""
        matrix = np.array(self.matrix, dtype=np.float64)
        n = len(self.speakers)
        if matrix.shape != (n, n):
            raise InvalidParameterError(f"Matrix shape {matrix.shape} does not match {n} speakers")
        if not np.all(np.isfinite(matrix)):
            raise InvalidParameterError("Similarity matrix entries must be finite")
        condition = Condition(self.condition)
        if condition.is_symmetric and not np.allclose(matrix, matrix.T, rtol=0.0, atol=SYMMETRY_TOLERANCE):
            raise InvalidParameterError(f"{condition.value} similarity matrix must be symmetric")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "speakers", list(self.speakers))
        object.__setattr__(self, "condition", condition)

    def __len__(self) -> int:
        return len(self.speakers)

    def reordered(self, speakers: Sequence[str]) -> "SimilarityMatrix":
        """Same matrix with rows and columns in the given speaker order"""
        if set(speakers) != set(self.speakers):
            raise MismatchedSpeakersError(self.speakers, speakers)
        index = [self.speakers.index(s) for s in speakers]
        return SimilarityMatrix(self.matrix[np.ix_(index, index)], list(speakers), self.condition)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'condition': self.condition.value,
            'speakers': self.speakers,
            'matrix': self.matrix.tolist(),
        }


@dataclass
class DistinctivenessGain:
    """G_vd with the two dominance values it came from"""
    g_vd: float
    d_diag_oo: float
    d_diag_aa: float
    degenerate: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            'g_vd': None if self.degenerate else self.g_vd,
            'd_diag_oo': self.d_diag_oo,
            'd_diag_aa': self.d_diag_aa,
            'g_vd_degenerate': self.degenerate,
        }


def _group_by_speaker(embeddings: Sequence[Embedding]) -> Dict[str, List[int]]:
    groups: Dict[str, List[int]] = {}
    for index, embedding in enumerate(embeddings):
        groups.setdefault(embedding.speaker_id, []).append(index)
    return groups


def similarity_matrix(
    orig_embeddings: Sequence[Embedding],
    anon_embeddings: Sequence[Embedding],
    condition: Condition,
) -> SimilarityMatrix:
    """
    Mean pairwise cosine score per speaker pair across two conditions

    Args:
        orig_embeddings: Row-side embeddings (originals for OO and OA, anonymized for AA)
        anon_embeddings: Column-side embeddings
        condition: OO, OA or AA; symmetric conditions skip pairs of an utterance with itself

    Returns:
        SimilarityMatrix with speakers in order of first appearance on the row side
    """
    condition = Condition(condition)
    rows = _group_by_speaker(orig_embeddings)
    columns = _group_by_speaker(anon_embeddings)
    if set(rows) != set(columns):
        raise MismatchedSpeakersError(rows, columns)
    speakers = list(rows)
    if len(speakers) < 2:
        raise InvalidParameterError(f"Similarity matrix needs at least 2 speakers, got {len(speakers)}")
    thin = [s for s in speakers if len(rows[s]) < 2 or len(columns[s]) < 2]
    if thin:
        raise InvalidParameterError(f"Speakers with fewer than 2 utterances in a condition: {thin}")

    scores = normalized_matrix(orig_embeddings) @ normalized_matrix(anon_embeddings).T
    scores = np.clip(scores, -1.0, 1.0)
    valid = np.ones_like(scores, dtype=bool)
    if condition.is_symmetric:
        row_ids = np.array([e.utterance_id for e in orig_embeddings], dtype=object)
        column_ids = np.array([e.utterance_id for e in anon_embeddings], dtype=object)
        valid = row_ids[:, None] != column_ids[None, :]

    matrix = np.empty((len(speakers), len(speakers)))
    for i, left in enumerate(speakers):
        for j, right in enumerate(speakers):
            block = scores[np.ix_(rows[left], columns[right])]
            mask = valid[np.ix_(rows[left], columns[right])]
            matrix[i, j] = float(np.mean(block[mask]))
    if condition.is_symmetric:
        matrix = 0.5 * (matrix + matrix.T)
    return SimilarityMatrix(matrix=matrix, speakers=speakers, condition=condition)


def diagonal_dominance(m: SimilarityMatrix) -> float:
    """|mean(diagonal) - mean(off-diagonal)|"""
    n = len(m)
    if n < 2:
        raise UndefinedDominanceError(f"Diagonal dominance needs at least 2 speakers, got {n}")
    diagonal = np.diag(m.matrix)
    off_diagonal = m.matrix[~np.eye(n, dtype=bool)]
    return float(abs(np.mean(diagonal) - np.mean(off_diagonal)))


def gain_of_voice_distinctiveness(m_oo: SimilarityMatrix, m_aa: SimilarityMatrix) -> DistinctivenessGain:
    """
    G_vd = 10 log10(D_diag(M_aa) / D_diag(M_oo)) in dB

    Args:
        m_oo: Original-original matrix (reference)
        m_aa: Anonymized-anonymized matrix over the same speakers

    Returns:
        DistinctivenessGain; a zero anonymized dominance gives -inf with the degenerate flag
    """
    if set(m_oo.speakers) != set(m_aa.speakers):
        raise MismatchedSpeakersError(m_oo.speakers, m_aa.speakers)
    m_aa = m_aa.reordered(m_oo.speakers)
    d_oo = diagonal_dominance(m_oo)
    d_aa = diagonal_dominance(m_aa)
    if d_oo == 0.0:
        raise DegenerateReferenceError("Original-condition diagonal dominance is zero")
    if d_aa == 0.0:
        return DistinctivenessGain(g_vd=-math.inf, d_diag_oo=d_oo, d_diag_aa=d_aa, degenerate=True)
    return DistinctivenessGain(g_vd=10.0 * math.log10(d_aa / d_oo), d_diag_oo=d_oo, d_diag_aa=d_aa)
