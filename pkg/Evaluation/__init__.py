"""
Evaluation Module for VoiceGuard
Toy speaker verifier, EER, voice similarity matrices and G_vd
"""

from .embeddings import mfcc, speaker_embedding, cosine_score, active_frames
from .verification import TrialScores, EerResult, compute_eer, operating_points, build_trials, score_trials
from .distinctiveness import (
    SimilarityMatrix,
    DistinctivenessGain,
    similarity_matrix,
    diagonal_dominance,
    gain_of_voice_distinctiveness,
)
from .evaluation_engine import EvaluationEngine, EvaluationResult, MetricsReport

__all__ = [
    'mfcc',
    'speaker_embedding',
    'cosine_score',
    'active_frames',
    'TrialScores',
    'EerResult',
    'compute_eer',
    'operating_points',
    'build_trials',
    'score_trials',
    'SimilarityMatrix',
    'DistinctivenessGain',
    'similarity_matrix',
    'diagonal_dominance',
    'gain_of_voice_distinctiveness',
    'EvaluationEngine',
    'EvaluationResult',
    'MetricsReport',
]
