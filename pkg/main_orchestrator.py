"""
Main Orchestrator for VoiceGuard
Coordinates batch anonymization, evaluation and factor sweeps over a corpus
"""

import traceback
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from loguru import logger
from tqdm import tqdm

from backend.config import SWEPT_ALPHA_RANGE, AnonymizationConfig, FormantConfig, MetricsConfig, PitchConfig
from backend.core.exceptions import InvalidParameterError, VoiceGuardError
from backend.models.speech_models import Manifest, ManifestRow, StrategyType
from Anonymization_Engine import AnonymizationReport, anonymize_utterance
from Data_Engine.audio_io import read_wav, write_wav
from Data_Engine.signal_analysis import estimate_formants, write_formant_csv, write_pitch_csv, yin_f0
from Evaluation import EvaluationEngine, EvaluationResult
from Logging_Monitoring.report_writer import ReportCollector
from Strategy_Framework import create_strategy

PathLike = Union[str, Path]

REPORTS_FILE = "reports.jsonl"
METRICS_FILE = "metrics.json"
SWEEP_FILE = "sweep.csv"
SWEEP_COLUMNS = ['alpha', 'eer_pct', 'rho_f0', 'g_vd']
DEFAULT_METRICS = ('eer_pct', 'rho_f0', 'g_vd')


class RunState(Enum):
    """Orchestrator states"""
    IDLE = "IDLE"
    ANONYMIZING = "ANONYMIZING"
    EVALUATING = "EVALUATING"
    SWEEPING = "SWEEPING"


@dataclass
class SweepSpec:
    """Strategy, factor list, metric set and output directory of a sweep"""
    strategy: StrategyType
    alphas: List[float]
    out_dir: Path
    metrics: Sequence[str] = DEFAULT_METRICS

    def __post_init__(self):
        """Validate sweep"""
        self.strategy = StrategyType.parse(self.strategy)
        self.out_dir = Path(self.out_dir)
        if not self.alphas:
            raise InvalidParameterError("Sweep needs at least one alpha")
        unknown = [m for m in self.metrics if m not in DEFAULT_METRICS]
        if unknown:
            raise InvalidParameterError(f"Unknown sweep metrics {unknown}; choose from {list(DEFAULT_METRICS)}")
        for alpha in self.alphas:
            create_strategy(self.strategy, alpha)
        low, high = SWEPT_ALPHA_RANGE[self.strategy]
        outside = [a for a in self.alphas if not low <= a <= high]
        if outside:
            logger.warning(f"alphas {outside} are outside the swept range [{low}, {high}] for {self.strategy.value}")

    @staticmethod
    def alpha_range(start: float, stop: float, step: float) -> List[float]:
        """Inclusive arithmetic range, rounded to avoid float drift"""
        if step <= 0 or stop < start:
            raise InvalidParameterError(f"Invalid alpha range {start}:{stop}:{step}")
        return [float(a) for a in np.round(np.arange(start, stop + step / 2.0, step), 10)]

    @staticmethod
    def directory_name(alpha: float) -> str:
        return f"alpha_{alpha:g}"


@dataclass
class BatchResult:
    """Outcome of one corpus anonymization"""
    out_dir: Path
    collector: ReportCollector
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_errors(self) -> int:
        return self.summary.get('errors', 0)


def _anonymize_row(row: ManifestRow, cfg: AnonymizationConfig, out_dir: Path) -> Dict[str, Any]:
    """Worker: anonymize one manifest row and write <utterance_id>.wav"""
    log = logger.bind(utterance_id=row.utterance_id)
    row_cfg = cfg.model_copy(update={'gender': row.gender})
    try:
        w = read_wav(row.wav_path)
        output, report = anonymize_utterance(w, row_cfg, row.utterance_id, row.speaker_id)
        write_wav(output, out_dir / f"{row.utterance_id}.wav")
        return report.to_dict()
    except VoiceGuardError as e:
        log.error(f"{type(e).__name__}: {e}")
        return AnonymizationReport.failed(row.utterance_id, e, row.speaker_id, row_cfg).to_dict()
    except Exception as e:
        log.error(f"Unexpected {type(e).__name__}: {e}\n{traceback.format_exc()}")
        return AnonymizationReport.failed(row.utterance_id, e, row.speaker_id, row_cfg).to_dict()


def _extract_row(row: ManifestRow, pitch: PitchConfig, formant: FormantConfig, out_dir: Path) -> Dict[str, Any]:
    """Worker: write <utterance_id>.f0.csv and <utterance_id>.formants.csv"""
    try:
        w = read_wav(row.wav_path)
        write_pitch_csv(yin_f0(w, pitch, row.utterance_id), out_dir / f"{row.utterance_id}.f0.csv")
        track = estimate_formants(w, formant, gender=row.gender, utterance_id=row.utterance_id)
        write_formant_csv(track, out_dir / f"{row.utterance_id}.formants.csv")
        return {'utterance_id': row.utterance_id, 'status': 'ok'}
    except VoiceGuardError as e:
        logger.bind(utterance_id=row.utterance_id).error(f"{type(e).__name__}: {e}")
        return {'utterance_id': row.utterance_id, 'status': 'error', 'error_type': type(e).__name__, 'message': str(e)}


class MainOrchestrator:
    """
    Batch front-end for the anonymization pipeline

    Utterances fan out over a joblib worker pool; reports are gathered by a
    single ReportCollector in manifest order.
    """

    def __init__(self, jobs: int = -1, progress: bool = True):
        """
        Initialize orchestrator

        Args:
            jobs: joblib worker count; -1 uses every core
            progress: Show tqdm progress bars
        """
        self.jobs = jobs
        self.progress = progress
        self.state = RunState.IDLE
        self.sweep_errors = 0

    def anonymize_corpus(self, manifest: Manifest, cfg: AnonymizationConfig, out_dir: PathLike) -> BatchResult:
        """
        Anonymize every manifest row into out_dir

        Args:
            manifest: Corpus listing
            cfg: Strategy, alpha, seed and analysis settings (gender comes from each row)
            out_dir: Receives <utterance_id>.wav files and reports.jsonl

        Returns:
            BatchResult; failing utterances are recorded, not raised
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        self.state = RunState.ANONYMIZING
        collector = ReportCollector(manifest.utterance_ids)
        if not len(manifest):
            logger.warning("Empty manifest: nothing to anonymize")
        else:
            logger.info(
                f"Anonymizing {len(manifest)} utterances with {cfg.strategy.value} alpha={cfg.alpha} "
                f"(seed {cfg.noise_seed}) into {out_dir}"
            )
            tasks = (delayed(_anonymize_row)(row, cfg, out_dir) for row in manifest)
            collector.extend(Parallel(n_jobs=self.jobs)(
                tqdm(tasks, total=len(manifest), desc=f"alpha={cfg.alpha:g}", disable=not self.progress)
            ))

        collector.write(out_dir / REPORTS_FILE)
        summary = collector.summary()
        if summary['errors']:
            logger.error(f"{summary['errors']} of {summary['total']} utterances failed: {summary['error_types']}")
        else:
            logger.info(f"Anonymized {summary['ok']} utterances")
        self.state = RunState.IDLE
        return BatchResult(out_dir, collector, summary)

    def evaluate_corpus(
        self,
        manifest: Manifest,
        anon_dir: PathLike,
        out_path: PathLike,
        metrics: Optional[MetricsConfig] = None,
        pitch: Optional[PitchConfig] = None,
        trials: Optional[pd.DataFrame] = None,
    ) -> EvaluationResult:
        """Evaluate anon_dir against the manifest and write the metrics report"""
        self.state = RunState.EVALUATING
        engine = EvaluationEngine(metrics, pitch, jobs=self.jobs, progress=self.progress)
        result = engine.evaluate(manifest, anon_dir, trials)
        engine.write(result, out_path)
        self.state = RunState.IDLE
        return result

    def extract_tracks(
        self,
        manifest: Manifest,
        out_dir: PathLike,
        pitch: Optional[PitchConfig] = None,
        formant: Optional[FormantConfig] = None,
    ) -> ReportCollector:
        """Dump pitch and formant CSVs for every manifest row; returns the per-row status"""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        pitch = pitch or PitchConfig()
        formant = formant or FormantConfig()
        collector = ReportCollector(manifest.utterance_ids)
        tasks = (delayed(_extract_row)(row, pitch, formant, out_dir) for row in manifest)
        collector.extend(Parallel(n_jobs=self.jobs)(
            tqdm(tasks, total=len(manifest), desc="Extracting", disable=not self.progress)
        ))
        logger.info(f"Extracted tracks of {len(collector.reports) - len(collector.errors)} utterances into {out_dir}")
        return collector

    def sweep(
        self,
        manifest: Manifest,
        spec: SweepSpec,
        cfg: AnonymizationConfig,
        metrics: Optional[MetricsConfig] = None,
        trials: Optional[pd.DataFrame] = None,
    ) -> pd.DataFrame:
        """
        Anonymize and evaluate the corpus once per alpha

        Args:
            manifest: Corpus listing
            spec: Strategy, alphas, metric set and output directory
            cfg: Base anonymization config; strategy and alpha are replaced per row
            metrics: Verifier settings
            trials: Trial list; derived from the manifest when None

        Returns:
            DataFrame alpha, eer_pct, rho_f0, g_vd (also written as sweep.csv plus
            one gnuplot data file per metric); errors of one alpha leave NaN cells
        """
        self.state = RunState.SWEEPING
        spec.out_dir.mkdir(parents=True, exist_ok=True)
        rows = []
        self.sweep_errors = 0
        for alpha in spec.alphas:
            alpha_dir = spec.out_dir / SweepSpec.directory_name(alpha)
            alpha_cfg = cfg.model_copy(update={'strategy': spec.strategy, 'alpha': alpha})
            row = {'alpha': alpha, 'eer_pct': np.nan, 'rho_f0': np.nan, 'g_vd': np.nan}
            try:
                batch = self.anonymize_corpus(manifest, alpha_cfg, alpha_dir)
                self.sweep_errors += batch.n_errors
                result = self.evaluate_corpus(manifest, alpha_dir, alpha_dir / METRICS_FILE, metrics, cfg.pitch, trials)
                report = result.report
                row.update({
                    'eer_pct': report.eer_pct,
                    'rho_f0': report.rho_f0 if report.rho_f0 is not None else np.nan,
                    'g_vd': report.g_vd,
                })
            except VoiceGuardError as e:
                self.sweep_errors += 1
                logger.error(f"alpha={alpha:g}: {type(e).__name__}: {e}")
            rows.append(row)
            logger.info(
                f"Sweep alpha={alpha:g}: EER {row['eer_pct']:.2f}%, rho_F0 {row['rho_f0']:.3f}, G_vd {row['g_vd']:.3f} dB"
            )

        table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
        columns = ['alpha', *[m for m in SWEEP_COLUMNS[1:] if m in spec.metrics]]
        table[columns].to_csv(spec.out_dir / SWEEP_FILE, index=False, float_format='%.6f')
        for metric in columns[1:]:
            write_plot_data(table, metric, spec.out_dir / f"sweep_{metric}.dat")
        self.state = RunState.IDLE
        return table[columns]


def write_plot_data(table: pd.DataFrame, metric: str, path: PathLike) -> Path:
    """gnuplot data file: a comment header, then 'alpha value' per line"""
    path = Path(path)
    with open(path, 'w') as f:
        f.write(f"# alpha {metric}\n")
        for alpha, value in zip(table['alpha'], table[metric]):
            f.write(f"{alpha:.6f} {'NaN' if np.isnan(value) else format(value, '.6f')}\n")
    return path
