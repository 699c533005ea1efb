"""
Gender-Dependent Scaling Strategy
Male speakers are enlarged by (1 + alpha), female speakers reduced by (1 - alpha)
"""

from typing import Optional

from loguru import logger

from backend.config import SWEPT_ALPHA_RANGE
from backend.core.exceptions import InvalidParameterError, MissingGenderError
from backend.models.speech_models import FormantTrack, Gender, PitchTrack, StrategyType
from .base_strategy import BaseScalingStrategy, ScaledFeatures, register_strategy


@register_strategy
class GenderDependentStrategy(BaseScalingStrategy):
    """Pushes male and female voices toward each other by one factor"""

    strategy_type = StrategyType.GENDER_DEPENDENT

    def __init__(self, alpha: float):
        super().__init__(alpha, name="GenderDependent")

    def validate_alpha(self) -> None:
        if not 0.0 <= self.alpha < 1.0:
            raise InvalidParameterError(f"gender_dependent alpha must be in [0, 1), got {self.alpha}")

    def effective_factor(self, gender: Gender = Gender.UNKNOWN) -> float:
        gender = Gender.from_label(gender)
        if gender == Gender.MALE:
            return 1.0 + self.alpha
        if gender == Gender.FEMALE:
            return 1.0 - self.alpha
        raise MissingGenderError("gender_dependent scaling requires a male or female speaker label")


def scale_gender_dependent(
    f0: PitchTrack,
    formants: FormantTrack,
    alpha: float,
    gender: Gender,
    synthesis_rate: Optional[int] = None,
    scale_bandwidths: bool = False,
) -> ScaledFeatures:
    """
    Scale F0 and formants by (1 + alpha) for male or (1 - alpha) for female speakers

    Args:
        f0: Source pitch track
        formants: Source formant track
        alpha: Factor in [0, 1)
        gender: Speaker gender; unknown raises MissingGenderError
        synthesis_rate: Formants beyond its Nyquist are clipped and counted
        scale_bandwidths: Scale bandwidths too

    Returns:
        ScaledFeatures
    """
    low, high = SWEPT_ALPHA_RANGE[StrategyType.GENDER_DEPENDENT]
    if 0.0 <= alpha < 1.0 and not low <= alpha <= high:
        logger.warning(f"alpha={alpha} is outside the swept range [{low}, {high}] for gender_dependent")
    return GenderDependentStrategy(alpha).scale(f0, formants, gender, synthesis_rate, scale_bandwidths)
