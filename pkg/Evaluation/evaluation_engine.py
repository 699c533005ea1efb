"""
Evaluation Engine for VoiceGuard
Scores an anonymized corpus against its originals: EER, rho_F0 and G_vd
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from loguru import logger
from tqdm import tqdm

from backend.config import MetricsConfig, PitchConfig
from backend.core.exceptions import (
    InsufficientTrialsError,
    MismatchedSpeakersError,
    MissingCounterpartError,
    VoiceGuardError,
)
from backend.models.speech_models import Condition, Embedding, Gender, Manifest
from Data_Engine.audio_io import read_wav
from Data_Engine.signal_analysis.pitch import pitch_correlation, yin_f0
from .distinctiveness import (
    DistinctivenessGain,
    SimilarityMatrix,
    diagonal_dominance,
    gain_of_voice_distinctiveness,
    similarity_matrix,
)
from .embeddings import speaker_embedding
from .verification import EerResult, TrialScores, build_trials, compute_eer, score_trials

PathLike = Union[str, Path]

REPORTS_FILE = "reports.jsonl"
ATTACKER = "ignorant"


@dataclass
class UtteranceAnalysis:
    """Embeddings and pitch correlation of one original/anonymized pair"""
    utterance_id: str
    orig_embedding: Optional[Embedding] = None
    anon_embedding: Optional[Embedding] = None
    rho_f0: Optional[float] = None
    errors: List[str] = field(default_factory=list)


@dataclass
class MetricsReport:
    """Privacy and utility metrics of one anonymized corpus"""
    eer_pct: float
    rho_f0: Optional[float]
    g_vd: float
    d_diag_oo: float
    d_diag_aa: float
    n_trials: int
    n_speakers: int
    eer_threshold: float = 0.0
    eer_sweep_pct: Optional[float] = None
    eer_lazy_informed_pct: Optional[float] = None
    eer_original_pct: Optional[float] = None
    d_diag_oa: Optional[float] = None
    g_vd_degenerate: bool = False
    n_rho_utterances: int = 0
    attacker: str = ATTACKER
    by_gender: Dict[str, Dict[str, Optional[float]]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary; a degenerate G_vd (-inf) is written as null"""
        return {
            'eer_pct': self.eer_pct,
            'rho_f0': self.rho_f0,
            'g_vd': None if self.g_vd_degenerate or not math.isfinite(self.g_vd) else self.g_vd,
            'd_diag_oo': self.d_diag_oo,
            'd_diag_aa': self.d_diag_aa,
            'n_trials': self.n_trials,
            'n_speakers': self.n_speakers,
            'eer_threshold': self.eer_threshold,
            'eer_sweep_pct': self.eer_sweep_pct,
            'eer_lazy_informed_pct': self.eer_lazy_informed_pct,
            'eer_original_pct': self.eer_original_pct,
            'd_diag_oa': self.d_diag_oa,
            'g_vd_degenerate': self.g_vd_degenerate,
            'n_rho_utterances': self.n_rho_utterances,
            'attacker': self.attacker,
            'by_gender': self.by_gender,
        }


@dataclass
class EvaluationResult:
    """MetricsReport plus the intermediate tables written next to it"""
    report: MetricsReport
    scores: TrialScores
    eer: EerResult
    matrices: Dict[Condition, SimilarityMatrix]
    gain: DistinctivenessGain
    n_failed: int = 0


def read_anonymized_speakers(anon_dir: PathLike) -> Optional[Dict[str, str]]:
    """utterance_id -> speaker_id from the reports.jsonl of an anonymized corpus, if present"""
    path = Path(anon_dir) / REPORTS_FILE
    if not path.exists():
        return None
    speakers = {}
    with open(path, 'r') as f:
        for line in f:
            line = line.strip()
            if line:
                record = json.loads(line)
                speakers[record['utterance_id']] = record.get('speaker_id', '')
    return speakers


def _analyze_pair(
    utterance_id: str,
    speaker_id: str,
    anon_speaker_id: str,
    orig_path: str,
    anon_path: str,
    metrics: MetricsConfig,
    pitch: PitchConfig,
) -> UtteranceAnalysis:
    """Worker: embeddings of both sides and the pair's pitch correlation"""
    analysis = UtteranceAnalysis(utterance_id)
    try:
        orig = read_wav(orig_path)
        anon = read_wav(anon_path)
    except (VoiceGuardError, OSError) as e:
        analysis.errors.append(f"{type(e).__name__}: {e}")
        return analysis

    try:
        analysis.orig_embedding = speaker_embedding(orig, metrics, utterance_id, speaker_id)
        analysis.anon_embedding = speaker_embedding(anon, metrics, utterance_id, anon_speaker_id)
    except VoiceGuardError as e:
        analysis.errors.append(f"{type(e).__name__}: {e}")

    try:
        correlation = pitch_correlation(
            yin_f0(orig, pitch, utterance_id),
            yin_f0(anon, pitch, utterance_id),
            interpolate_unvoiced=metrics.interpolate_unvoiced,
        )
        analysis.rho_f0 = correlation.value
    except VoiceGuardError as e:
        analysis.errors.append(f"{type(e).__name__}: {e}")
    return analysis


class EvaluationEngine:
    """
    Corpus-level evaluation

    The attacker is ignorant: enrollment on original speech, test on anonymized
    speech. The lazy-informed variant (both sides anonymized) and the clean
    verifier baseline are reported alongside.
    """

    def __init__(
        self,
        metrics: Optional[MetricsConfig] = None,
        pitch: Optional[PitchConfig] = None,
        jobs: int = -1,
        progress: bool = True,
    ):
        self.metrics = metrics or MetricsConfig()
        self.pitch = pitch or PitchConfig()
        self.jobs = jobs
        self.progress = progress

    def evaluate(
        self,
        manifest: Manifest,
        anon_dir: PathLike,
        trials: Optional[pd.DataFrame] = None,
    ) -> EvaluationResult:
        """
        Evaluate an anonymized corpus

        Args:
            manifest: Original corpus
            anon_dir: Directory holding <utterance_id>.wav for every manifest row
            trials: enroll_utt, test_utt, label; derived from the manifest when None

        Returns:
            EvaluationResult
        """
        anon_dir = Path(anon_dir)
        anon_speakers = read_anonymized_speakers(anon_dir)
        if anon_speakers is not None and set(anon_speakers.values()) != set(manifest.speakers):
            raise MismatchedSpeakersError(manifest.speakers, anon_speakers.values())
        anon_speakers = anon_speakers or {}

        anon_paths = {row.utterance_id: anon_dir / f"{row.utterance_id}.wav" for row in manifest}
        missing = [utt for utt, path in anon_paths.items() if not path.exists()]
        if missing:
            raise MissingCounterpartError(missing)

        if trials is None:
            trials = build_trials(manifest)
        logger.info(f"Evaluating {len(manifest)} utterances of {len(manifest.speakers)} speakers in {anon_dir}")

        tasks = (
            delayed(_analyze_pair)(
                row.utterance_id,
                row.speaker_id,
                anon_speakers.get(row.utterance_id, row.speaker_id),
                row.wav_path,
                str(anon_paths[row.utterance_id]),
                self.metrics,
                self.pitch,
            )
            for row in manifest
        )
        analyses: List[UtteranceAnalysis] = Parallel(n_jobs=self.jobs)(
            tqdm(tasks, total=len(manifest), desc="Evaluating", disable=not self.progress)
        )

        n_failed = 0
        for analysis in analyses:
            for message in analysis.errors:
                logger.bind(utterance_id=analysis.utterance_id).warning(message)
            n_failed += bool(analysis.errors)

        orig = {a.utterance_id: a.orig_embedding for a in analyses if a.orig_embedding is not None}
        anon = {a.utterance_id: a.anon_embedding for a in analyses if a.anon_embedding is not None}

        scores = score_trials(trials, orig, anon, skip_missing=True)
        if len(scores) < len(trials):
            logger.warning(f"{len(trials) - len(scores)} trials dropped for missing embeddings")
        eer = compute_eer(scores)
        lazy = self._optional_eer(score_trials(trials, anon, anon, skip_missing=True))
        clean = self._optional_eer(score_trials(trials, orig, orig, skip_missing=True))

        orig_list = [orig[u] for u in manifest.utterance_ids if u in orig]
        anon_list = [anon[u] for u in manifest.utterance_ids if u in anon]
        matrices = {
            Condition.OO: similarity_matrix(orig_list, orig_list, Condition.OO),
            Condition.AA: similarity_matrix(anon_list, anon_list, Condition.AA),
            Condition.OA: similarity_matrix(orig_list, anon_list, Condition.OA),
        }
        gain = gain_of_voice_distinctiveness(matrices[Condition.OO], matrices[Condition.AA])
        if gain.degenerate:
            logger.warning("Anonymized corpus has zero diagonal dominance; G_vd is -inf")

        rho = {a.utterance_id: a.rho_f0 for a in analyses if a.rho_f0 is not None}
        report = MetricsReport(
            eer_pct=eer.eer_pct,
            rho_f0=float(np.mean(list(rho.values()))) if rho else None,
            g_vd=gain.g_vd,
            d_diag_oo=gain.d_diag_oo,
            d_diag_aa=gain.d_diag_aa,
            n_trials=len(scores),
            n_speakers=len(matrices[Condition.OO]),
            eer_threshold=eer.threshold,
            eer_sweep_pct=eer.eer_sweep_pct,
            eer_lazy_informed_pct=lazy,
            eer_original_pct=clean,
            d_diag_oa=diagonal_dominance(matrices[Condition.OA]),
            g_vd_degenerate=gain.degenerate,
            n_rho_utterances=len(rho),
            by_gender=self._by_gender(manifest, scores, rho),
        )
        return EvaluationResult(report, scores, eer, matrices, gain, n_failed)

    @staticmethod
    def _optional_eer(scores: TrialScores) -> Optional[float]:
        try:
            return compute_eer(scores).eer_pct
        except InsufficientTrialsError:
            return None

    def _by_gender(
        self,
        manifest: Manifest,
        scores: TrialScores,
        rho: Dict[str, float],
    ) -> Dict[str, Dict[str, Optional[float]]]:
        """EER and rho_F0 per gender; a trial belongs to its enrollment speaker's gender"""
        rows = manifest.by_id()
        enroll_gender = np.array([rows[u].gender.short for u in scores.enroll_utts], dtype=object)
        breakdown = {}
        for gender in (Gender.FEMALE, Gender.MALE):
            values = [v for u, v in rho.items() if rows[u].gender == gender]
            breakdown[gender.short] = {
                'eer_pct': self._optional_eer(scores.subset(enroll_gender == gender.short)),
                'rho_f0': float(np.mean(values)) if values else None,
            }
        return breakdown

    def write(self, result: EvaluationResult, out_path: PathLike) -> Path:
        """
        Write the metrics report JSON and its companion files

        Args:
            result: Evaluation output
            out_path: Report JSON path; similarity_*.json, scores.csv and
                det_points.csv are written next to it

        Returns:
            Path of the report
        """
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with open(out_path, 'w') as f:
            json.dump(result.report.to_dict(), f, indent=2)
            f.write("\n")
        for condition, matrix in result.matrices.items():
            with open(out_path.parent / f"similarity_{condition.value.lower()}.json", 'w') as f:
                json.dump(matrix.to_dict(), f, indent=2)
                f.write("\n")
        result.scores.to_frame().to_csv(out_path.parent / "scores.csv", index=False, float_format='%.10f')
        result.eer.det_points.to_csv(out_path.parent / "det_points.csv", index=False, float_format='%.10f')
        logger.info(
            f"Metrics: EER {result.report.eer_pct:.2f}%, rho_F0 {result.report.rho_f0}, "
            f"G_vd {result.report.g_vd:.3f} dB -> {out_path}"
        )
        return out_path
