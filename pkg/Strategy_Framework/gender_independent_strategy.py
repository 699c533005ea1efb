"""
Gender-Independent Scaling Strategy
One factor alpha for every speaker: f_anon = alpha * f_src, p_anon = alpha * p_src
"""

from typing import Optional

from loguru import logger

from backend.config import SWEPT_ALPHA_RANGE
from backend.core.exceptions import InvalidParameterError
from backend.models.speech_models import FormantTrack, Gender, PitchTrack, StrategyType
from .base_strategy import BaseScalingStrategy, ScaledFeatures, register_strategy


@register_strategy
class GenderIndependentStrategy(BaseScalingStrategy):
    """Uniform scaling with the same factor for all speakers"""

    strategy_type = StrategyType.GENDER_INDEPENDENT

    def __init__(self, alpha: float):
        super().__init__(alpha, name="GenderIndependent")

    def validate_alpha(self) -> None:
        if not self.alpha > 0:
            raise InvalidParameterError(f"gender_independent alpha must be positive, got {self.alpha}")

    def effective_factor(self, gender: Gender = Gender.UNKNOWN) -> float:
        return self.alpha


def scale_gender_independent(
    f0: PitchTrack,
    formants: FormantTrack,
    alpha: float,
    synthesis_rate: Optional[int] = None,
    scale_bandwidths: bool = False,
) -> ScaledFeatures:
    """
    Scale F0 and formants of one utterance by alpha

    Args:
        f0: Source pitch track
        formants: Source formant track
        alpha: Factor (> 0)
        synthesis_rate: Formants beyond its Nyquist are clipped and counted
        scale_bandwidths: Scale bandwidths too

    Returns:
        ScaledFeatures
    """
    low, high = SWEPT_ALPHA_RANGE[StrategyType.GENDER_INDEPENDENT]
    if alpha > 0 and not low <= alpha <= high:
        logger.warning(f"alpha={alpha} is outside the swept range [{low}, {high}] for gender_independent")
    return GenderIndependentStrategy(alpha).scale(f0, formants, Gender.UNKNOWN, synthesis_rate, scale_bandwidths)
