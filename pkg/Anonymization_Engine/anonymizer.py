"""
Utterance Anonymizer for VoiceGuard
Analysis, scaling and resynthesis of one utterance with its JSON report
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from backend.config import AnonymizationConfig
from backend.core.exceptions import EmptyInputError
from backend.models.speech_models import Gender, Waveform
from Data_Engine.signal_analysis.formants import estimate_formants
from Data_Engine.signal_analysis.pitch import yin_f0
from Strategy_Framework import create_strategy
from .vocoder import resynthesize, utterance_rng

# Minimum analysis length in pitch frames
MIN_FRAMES = 3


@dataclass
class AnonymizationReport:
    """Per-utterance anonymization outcome"""
    utterance_id: str
    speaker_id: str = ""
    gender: Gender = Gender.UNKNOWN
    strategy: str = ""
    alpha: float = 0.0
    effective_factor: Optional[float] = None
    effective_factors: List[float] = field(default_factory=list)
    formant_clip_count: int = 0
    pole_clamp_count: int = 0
    unstable_pole_count: int = 0
    voiced_frames: List[int] = field(default_factory=list)
    source_mean_f0: Optional[float] = None
    output_mean_f0: Optional[float] = None
    achieved_f0_ratio: Optional[float] = None
    noise_seed: int = 0
    silent_input: bool = False
    peak_normalized: bool = False
    n_samples_in: int = 0
    n_samples_out: int = 0
    status: str = "ok"
    error_type: Optional[str] = None
    message: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        data = {
            'utterance_id': self.utterance_id,
            'speaker_id': self.speaker_id,
            'gender': self.gender.short,
            'strategy': self.strategy,
            'alpha': self.alpha,
            'effective_factor': self.effective_factor,
            'effective_factors': self.effective_factors,
            'formant_clip_count': self.formant_clip_count,
            'pole_clamp_count': self.pole_clamp_count,
            'unstable_pole_count': self.unstable_pole_count,
            'voiced_frames': self.voiced_frames,
            'source_mean_f0': self.source_mean_f0,
            'output_mean_f0': self.output_mean_f0,
            'achieved_f0_ratio': self.achieved_f0_ratio,
            'noise_seed': self.noise_seed,
            'silent_input': self.silent_input,
            'peak_normalized': self.peak_normalized,
            'n_samples_in': self.n_samples_in,
            'n_samples_out': self.n_samples_out,
            'status': self.status,
        }
        if self.status != "ok":
            data['error_type'] = self.error_type
            data['message'] = self.message
        return data

    @classmethod
    def failed(
        cls,
        utterance_id: str,
        error: BaseException,
        speaker_id: str = "",
        cfg: Optional[AnonymizationConfig] = None,
    ) -> "AnonymizationReport":
        """Report for an utterance that raised"""
        return cls(
            utterance_id=utterance_id,
            speaker_id=speaker_id,
            gender=cfg.gender if cfg else Gender.UNKNOWN,
            strategy=cfg.strategy.value if cfg else "",
            alpha=cfg.alpha if cfg else 0.0,
            noise_seed=cfg.noise_seed if cfg else 0,
            status="error",
            error_type=type(error).__name__,
            message=str(error),
        )


def anonymize_utterance(
    w: Waveform,
    cfg: AnonymizationConfig,
    utterance_id: str = "",
    speaker_id: str = "",
) -> Tuple[Waveform, AnonymizationReport]:
    """
    Anonymize one utterance by scaling its formants and F0

    Args:
        w: Source waveform, at least three analysis frames long
        cfg: Strategy, alpha, gender, seed and analysis settings
        utterance_id: Mixed into the unvoiced-noise seed and copied into the report
        speaker_id: Copied into the report

    Returns:
        Anonymized waveform (same length as w) and its report
    """
    log = logger.bind(utterance_id=utterance_id)
    strategy = create_strategy(cfg.strategy, cfg.alpha)
    factor = strategy.effective_factor(cfg.gender)

    frame_len = w.ms_to_samples(cfg.pitch.frame_ms)
    hop = w.ms_to_samples(cfg.pitch.hop_ms)
    if len(w) < frame_len + (MIN_FRAMES - 1) * hop:
        raise EmptyInputError(
            f"Waveform of {len(w)} samples is shorter than {MIN_FRAMES} analysis frames"
        )

    rng = utterance_rng(cfg.noise_seed, utterance_id)
    report = AnonymizationReport(
        utterance_id=utterance_id,
        speaker_id=speaker_id,
        gender=cfg.gender,
        strategy=cfg.strategy.value,
        alpha=cfg.alpha,
        effective_factor=factor,
        noise_seed=cfg.noise_seed,
        n_samples_in=len(w),
    )

    if not np.any(w.samples):
        log.warning("All-silent input returned unchanged")
        report.silent_input = True
        report.n_samples_out = len(w)
        return w, report

    pitch = yin_f0(w, cfg.pitch, utterance_id=utterance_id)
    formants = estimate_formants(w, cfg.formant, gender=cfg.gender, utterance_id=utterance_id)
    scaled = strategy.scale(
        pitch,
        formants,
        cfg.gender,
        synthesis_rate=w.sample_rate,
        scale_bandwidths=cfg.formant.scale_bandwidths,
    )

    result = resynthesize(w, scaled.f0_anon, scaled.envelope_warp, cfg.synthesis, rng, cfg.pitch.frame_ms)
    output = result.waveform
    achieved = yin_f0(output, cfg.pitch, utterance_id=utterance_id)

    report.effective_factors = [float(v) for v in scaled.envelope_warp]
    report.formant_clip_count = scaled.formant_clip_count
    report.pole_clamp_count = result.pole_clamp_count
    report.unstable_pole_count = result.unstable_pole_count
    report.voiced_frames = scaled.voiced_frames
    report.source_mean_f0 = pitch.mean_voiced_f0()
    report.output_mean_f0 = achieved.mean_voiced_f0()
    if report.source_mean_f0 and report.output_mean_f0:
        report.achieved_f0_ratio = report.output_mean_f0 / report.source_mean_f0
    report.peak_normalized = result.peak_normalized
    report.n_samples_out = len(output)

    if result.unstable_pole_count:
        log.warning(f"{result.unstable_pole_count} unstable poles clamped to {cfg.synthesis.max_pole_radius}")
    log.debug(
        f"Anonymized with factor {factor:.3f}: F0 ratio {report.achieved_f0_ratio}, "
        f"{report.formant_clip_count} formants clipped, {report.pole_clamp_count} poles clamped"
    )
    return output, report
