"""
Base Scaling Strategy Interface
Abstract base class for the formant/F0 scaling rules and the feature-level scaling kernel
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional, Type

import numpy as np
from loguru import logger

from backend.core.exceptions import InvalidParameterError
from backend.models.speech_models import (
    FormantFrame,
    FormantTrack,
    Gender,
    PitchTrack,
    StrategyType,
)

MIN_FORMANT_HZ = 50.0


@dataclass(frozen=True, eq=False)
class ScaledFeatures:
    """Anonymized pitch and formant tracks plus the per-frame envelope warp"""
    f0_anon: PitchTrack
    formants_anon: FormantTrack
    envelope_warp: np.ndarray
    effective_factor: float
    formant_clip_count: int = 0
    source_f0: Optional[PitchTrack] = None
    source_formants: Optional[FormantTrack] = None
    synthesis_rate: Optional[int] = None
    scale_bandwidths: bool = False

    def __post_init__(self):
        warp = np.array(self.envelope_warp, dtype=np.float64)
        warp.setflags(write=False)
        if not np.all(warp == self.effective_factor):
            raise InvalidParameterError("Envelope warp must equal the effective factor on every frame")
        object.__setattr__(self, "envelope_warp", warp)

    @property
    def voiced_frames(self):
        return self.f0_anon.voiced_indices

    def compose(self, alpha: float) -> "ScaledFeatures":
        """
        Scale the already scaled tracks again by alpha

        Args:
            alpha: Additional factor

        Returns:
            ScaledFeatures with effective_factor * alpha. Without clipping this matches
            scaling the source once by the product; formants clipped by an earlier
            factor stay dropped and the clip counts add up.
        """
        step = scale_tracks(
            self.f0_anon,
            self.formants_anon,
            alpha,
            synthesis_rate=self.synthesis_rate,
            scale_bandwidths=self.scale_bandwidths,
        )
        factor = self.effective_factor * step.effective_factor
        return ScaledFeatures(
            f0_anon=step.f0_anon,
            formants_anon=step.formants_anon,
            envelope_warp=np.full(step.envelope_warp.size, factor),
            effective_factor=factor,
            formant_clip_count=self.formant_clip_count + step.formant_clip_count,
            source_f0=self.source_f0,
            source_formants=self.source_formants,
            synthesis_rate=self.synthesis_rate,
            scale_bandwidths=self.scale_bandwidths,
        )


def scale_tracks(
    f0: PitchTrack,
    formants: FormantTrack,
    factor: float,
    synthesis_rate: Optional[int] = None,
    scale_bandwidths: bool = False,
) -> ScaledFeatures:
    """
    Multiply every voiced F0 and every formant frequency by one factor

    Args:
        f0: Source pitch track
        formants: Source formant track
        factor: Effective scaling factor (> 0)
        synthesis_rate: Formants at or above its Nyquist are clipped out
        scale_bandwidths: Scale bandwidths along with frequencies

    Returns:
        ScaledFeatures; the scaled track's ceiling is min(ceiling * factor, synthesis Nyquist)
    """
    factor = float(factor)
    if not factor > 0 or not np.isfinite(factor):
        raise InvalidParameterError(f"Scaling factor must be positive and finite, got {factor}")

    scaled_f0 = np.where(f0.voiced, f0.f0 * factor, 0.0)
    pitch = PitchTrack(f0=scaled_f0, voiced=f0.voiced, hop_ms=f0.hop_ms, utterance_id=f0.utterance_id)

    ceiling = formants.ceiling_hz * factor
    if synthesis_rate is not None:
        ceiling = min(ceiling, synthesis_rate / 2.0)

    clipped = 0
    frames = []
    for frame in formants.frames:
        kept = []
        for frequency, bandwidth in frame.formants:
            scaled = frequency * factor
            if not MIN_FORMANT_HZ < scaled < ceiling:
                clipped += 1
                continue
            kept.append((scaled, bandwidth * factor if scale_bandwidths else bandwidth))
        frames.append(FormantFrame(tuple(kept)))

    track = FormantTrack(
        frames=tuple(frames),
        hop_ms=formants.hop_ms,
        ceiling_hz=ceiling,
        max_formants=formants.max_formants,
        utterance_id=formants.utterance_id,
    )
    return ScaledFeatures(
        f0_anon=pitch,
        formants_anon=track,
        envelope_warp=np.full(max(len(f0), len(formants)), factor),
        effective_factor=factor,
        formant_clip_count=clipped,
        source_f0=f0,
        source_formants=formants,
        synthesis_rate=synthesis_rate,
        scale_bandwidths=scale_bandwidths,
    )


class BaseScalingStrategy(ABC):
    """
    Abstract base class for anonymization scaling rules

    Subclasses map (alpha, gender) to one effective factor; the factor is then
    applied uniformly to F0 and formants of every frame.
    """

    strategy_type: StrategyType

    def __init__(self, alpha: float, name: str):
        """
        Initialize strategy

        Args:
            alpha: Strategy factor
            name: Display name
        """
        self.alpha = float(alpha)
        self.name = name
        self.validate_alpha()

    @abstractmethod
    def validate_alpha(self) -> None:
        """Raise InvalidParameterError when alpha is outside the valid range"""

    @abstractmethod
    def effective_factor(self, gender: Gender) -> float:
        """
        Factor applied to F0 and formants for a speaker of this gender

        Args:
            gender: Speaker gender

        Returns:
            Positive scaling factor
        """

    def scale(
        self,
        f0: PitchTrack,
        formants: FormantTrack,
        gender: Gender = Gender.UNKNOWN,
        synthesis_rate: Optional[int] = None,
        scale_bandwidths: bool = False,
    ) -> ScaledFeatures:
        """Apply the strategy to one utterance's tracks"""
        factor = self.effective_factor(gender)
        features = scale_tracks(f0, formants, factor, synthesis_rate, scale_bandwidths)
        if features.formant_clip_count:
            logger.bind(utterance_id=f0.utterance_id).debug(
                f"{self.name}: {features.formant_clip_count} formants clipped at factor {factor:.3f}"
            )
        return features

    def __repr__(self) -> str:
        return f"{type(self).__name__}(alpha={self.alpha})"


_REGISTRY: Dict[StrategyType, Type[BaseScalingStrategy]] = {}


def register_strategy(cls: Type[BaseScalingStrategy]) -> Type[BaseScalingStrategy]:
    _REGISTRY[cls.strategy_type] = cls
    return cls


def create_strategy(strategy: StrategyType, alpha: float) -> BaseScalingStrategy:
    """
    Build the scaling strategy for a StrategyType

    Args:
        strategy: Strategy type or its name (dashes allowed)
        alpha: Strategy factor

    Returns:
        Strategy instance
    """
    return _REGISTRY[StrategyType.parse(strategy)](alpha)
