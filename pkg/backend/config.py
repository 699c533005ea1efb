"""
Configuration management for VoiceGuard
Loads settings from config.yaml and environment variables
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from loguru import logger
from pydantic import BaseModel, Field, field_validator, model_validator

from backend.core.config import get_settings
from backend.core.exceptions import InvalidParameterError
from backend.models.speech_models import Gender, StrategyType

# Formant analysis ceiling per gender (Hz)
CEILING_BY_GENDER: Dict[Gender, float] = {
    Gender.MALE: 5000.0,
    Gender.FEMALE: 5500.0,
    Gender.UNKNOWN: 5500.0,
}

MAX_SYNTHESIS_ORDER = 32

# Alpha ranges covered by the factor sweeps; values outside are allowed but logged
SWEPT_ALPHA_RANGE = {
    StrategyType.GENDER_INDEPENDENT: (0.5, 1.5),
    StrategyType.GENDER_DEPENDENT: (0.0, 0.5),
}


class PitchConfig(BaseModel):
    """YIN analysis configuration"""
    f0_min: float = Field(default=60.0, description="Lowest F0 searched (Hz)")
    f0_max: float = Field(default=500.0, description="Highest F0 searched (Hz)")
    frame_ms: float = Field(default=25.0, description="Integration window (ms)")
    hop_ms: float = Field(default=10.0, description="Frame step (ms)")
    yin_threshold: float = Field(default=0.15, description="Absolute threshold on the CMND function")
    median_filter: bool = Field(default=False, description="3-frame median filter on voiced f0")

    @model_validator(mode="after")
    def _check_ranges(self) -> "PitchConfig":
        if not 0 < self.f0_min < self.f0_max:
            raise ValueError(f"Need 0 < f0_min < f0_max, got {self.f0_min}/{self.f0_max}")
        if not 0 < self.yin_threshold < 1:
            raise ValueError(f"yin_threshold must be in (0, 1), got {self.yin_threshold}")
        if not self.frame_ms >= self.hop_ms > 0:
            raise ValueError(f"Need frame_ms >= hop_ms > 0, got {self.frame_ms}/{self.hop_ms}")
        return self

    def check_sample_rate(self, sample_rate: int) -> None:
        """f0_max must stay below the Nyquist frequency"""
        if self.f0_max >= sample_rate / 2:
            raise InvalidParameterError(
                f"f0_max {self.f0_max} Hz must be below Nyquist of {sample_rate} Hz"
            )


class FormantConfig(BaseModel):
    """LPC formant analysis configuration"""
    max_formants: int = Field(default=5, ge=1, description="Formants reported per frame")
    ceiling_hz: Optional[float] = Field(default=None, description="Analysis ceiling; None picks the gender default")
    lpc_order: Optional[int] = Field(default=None, description="Burg order; None means 2*max_formants + 2")
    pre_emphasis_hz: float = Field(default=50.0, ge=0, description="Pre-emphasis corner (Hz)")
    frame_ms: float = Field(default=25.0, gt=0)
    hop_ms: float = Field(default=10.0, gt=0)
    max_bandwidth_hz: float = Field(default=400.0, gt=0, description="Wider poles are not formants")
    silence_dbfs: float = Field(default=-60.0, description="Frames below this level get no formants")
    scale_bandwidths: bool = Field(default=False, description="Scale bandwidths along with frequencies")

    @model_validator(mode="after")
    def _check_order(self) -> "FormantConfig":
        if self.lpc_order is not None and self.lpc_order < 2 * self.max_formants:
            raise ValueError(f"lpc_order {self.lpc_order} must be >= 2*max_formants ({2 * self.max_formants})")
        if self.ceiling_hz is not None and self.ceiling_hz <= 50:
            raise ValueError(f"ceiling_hz must exceed 50 Hz, got {self.ceiling_hz}")
        if self.frame_ms < self.hop_ms:
            raise ValueError(f"Need frame_ms >= hop_ms, got {self.frame_ms}/{self.hop_ms}")
        return self

    @property
    def order(self) -> int:
        return self.lpc_order if self.lpc_order is not None else 2 * self.max_formants + 2

    def for_gender(self, gender: Gender) -> "FormantConfig":
        """Copy with the ceiling resolved for the speaker's gender"""
        if self.ceiling_hz is not None:
            return self
        return self.model_copy(update={"ceiling_hz": CEILING_BY_GENDER[Gender(gender)]})


class SynthesisConfig(BaseModel):
    """Source-filter resynthesis configuration"""
    lpc_order: Optional[int] = Field(default=None, description="Envelope order; None means 2 + rate/1000")
    pre_emphasis_hz: float = Field(default=50.0, ge=0)
    nyquist_guard: float = Field(default=0.98, gt=0, lt=1, description="Warped pole angles are clamped to guard*pi")
    damped_radius: float = Field(default=0.9, gt=0, lt=1, description="Radius of poles clamped at the guard")
    max_pole_radius: float = Field(default=0.995, gt=0, lt=1, description="Stability clamp for unstable poles")

    def order_for(self, sample_rate: int) -> int:
        """Envelope order at this rate, capped at the root finder's degree limit"""
        order = self.lpc_order if self.lpc_order is not None else 2 + sample_rate // 1000
        return min(order, MAX_SYNTHESIS_ORDER)


class AnonymizationConfig(BaseModel):
    """Strategy, factor and analysis settings for one utterance"""
    strategy: StrategyType = Field(default=StrategyType.GENDER_DEPENDENT)
    alpha: float = Field(default=0.3, description="Scaling factor of the chosen strategy")
    gender: Gender = Field(default=Gender.UNKNOWN)
    noise_seed: int = Field(default=0, description="Seed of the unvoiced excitation")
    pitch: PitchConfig = Field(default_factory=PitchConfig)
    formant: FormantConfig = Field(default_factory=FormantConfig)
    synthesis: SynthesisConfig = Field(default_factory=SynthesisConfig)

    @field_validator("strategy", mode="before")
    @classmethod
    def _parse_strategy(cls, value: Any) -> Any:
        return StrategyType.parse(value) if isinstance(value, str) else value

    @field_validator("gender", mode="before")
    @classmethod
    def _parse_gender(cls, value: Any) -> Any:
        return Gender.from_label(value) if isinstance(value, str) or value is None else value

    @model_validator(mode="after")
    def _check_alpha(self) -> "AnonymizationConfig":
        if self.strategy == StrategyType.GENDER_INDEPENDENT and self.alpha <= 0:
            raise ValueError(f"gender_independent alpha must be positive, got {self.alpha}")
        if self.strategy == StrategyType.GENDER_DEPENDENT and not 0 <= self.alpha < 1:
            raise ValueError(f"gender_dependent alpha must be in [0, 1), got {self.alpha}")
        low, high = SWEPT_ALPHA_RANGE[self.strategy]
        if not low <= self.alpha <= high:
            logger.warning(
                f"alpha={self.alpha} is outside the swept range [{low}, {high}] "
                f"for {self.strategy.value}"
            )
        return self


class MetricsConfig(BaseModel):
    """Toy verifier and metric settings"""
    n_mfcc: int = Field(default=20, ge=8, le=24)
    n_mels: int = Field(default=26, ge=8)
    frame_ms: float = Field(default=25.0, gt=0)
    hop_ms: float = Field(default=10.0, gt=0)
    active_dbfs: float = Field(default=-50.0, description="Frames above this level feed the embedding")
    min_active_frames: int = Field(default=50, ge=1)
    interpolate_unvoiced: bool = Field(default=False, description="Interpolate unvoiced gaps for rho_F0")


class ProcessingConfig(BaseModel):
    """Batch execution settings"""
    jobs: int = Field(default=-1, description="Worker count; -1 uses every core")


class CorpusConfig(BaseModel):
    """Synthetic desk corpus settings"""
    speakers: int = Field(default=8, ge=2)
    utterances: int = Field(default=10, ge=2)
    duration_s: float = Field(default=1.2, gt=0.5)
    sample_rate: int = Field(default=16000, ge=8000)
    speaker_prefix: str = Field(default="spk")


class LoggingConfig(BaseModel):
    """Logging configuration"""
    level: str = Field(default="INFO")
    file: Optional[str] = Field(default=None)
    rotation: str = Field(default="10 MB")
    retention: str = Field(default="30 days")


class Config:
    """Main configuration class"""

    def __init__(self, config_path: Optional[str] = None):
        settings = get_settings()
        self.settings = settings
        self.explicit = config_path is not None
        self.config_path = Path(config_path if config_path is not None else settings.config)
        self._config: Dict[str, Any] = {}
        self.load_config()

    def load_config(self):
        """Load configuration from YAML file"""
        if not self.config_path.exists():
            if self.explicit:
                raise FileNotFoundError(f"Configuration file not found: {self.config_path}")
            self._config = {}
            return

        with open(self.config_path, 'r') as f:
            self._config = yaml.safe_load(f) or {}

        if not isinstance(self._config, dict):
            raise InvalidParameterError(f"Configuration file {self.config_path} must hold a mapping")

        # Replace environment variable placeholders
        self._replace_env_vars(self._config)

    def _replace_env_vars(self, config: Dict[str, Any]):
        """Recursively replace ${VAR} with environment variables"""
        for key, value in config.items():
            if isinstance(value, dict):
                self._replace_env_vars(value)
            elif isinstance(value, str) and value.startswith("${") and value.endswith("}"):
                env_var = value[2:-1]
                config[key] = os.getenv(env_var, value)

    def _section(self, name: str) -> Dict[str, Any]:
        section = self._config.get(name) or {}
        if not isinstance(section, dict):
            raise InvalidParameterError(f"Config section '{name}' must be a mapping")
        return dict(section)

    @property
    def pitch(self) -> PitchConfig:
        return PitchConfig(**self._section('pitch'))

    @property
    def formant(self) -> FormantConfig:
        return FormantConfig(**self._section('formant'))

    @property
    def synthesis(self) -> SynthesisConfig:
        return SynthesisConfig(**self._section('synthesis'))

    @property
    def metrics(self) -> MetricsConfig:
        return MetricsConfig(**self._section('metrics'))

    @property
    def processing(self) -> ProcessingConfig:
        return ProcessingConfig(**self._section('processing'))

    @property
    def corpus(self) -> CorpusConfig:
        return CorpusConfig(**self._section('corpus'))

    @property
    def logging_config(self) -> LoggingConfig:
        section = self._section('logging')
        if self.settings.log_level:
            section['level'] = self.settings.log_level
        return LoggingConfig(**section)

    @property
    def seed(self) -> int:
        """Config file seed, then VOICEGUARD_SEED, then 0"""
        value = self.get('anonymization.seed')
        if value is None:
            value = self.settings.seed
        return int(value) if value is not None else 0

    def anonymization(self, **overrides: Any) -> AnonymizationConfig:
        """
        Build the anonymization config: flags > config file > defaults

        Args:
            overrides: strategy, alpha, gender, noise_seed; None values are ignored

        Returns:
            Validated AnonymizationConfig
        """
        section = self._section('anonymization')
        section.pop('seed', None)
        values: Dict[str, Any] = {
            **section,
            'noise_seed': self.seed,
            'pitch': self.pitch,
            'formant': self.formant,
            'synthesis': self.synthesis,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return AnonymizationConfig(**values)

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value by dotted key"""
        keys = key.split('.')
        value = self._config
        for k in keys:
            if isinstance(value, dict):
                value = value.get(k)
            else:
                return default
        return value if value is not None else default
