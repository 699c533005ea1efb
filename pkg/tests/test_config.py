"""YAML configuration, settings precedence, logging and report collection"""

import json

import pytest
from loguru import logger
from pydantic import ValidationError

from backend.config import AnonymizationConfig, Config, FormantConfig, LoggingConfig, SynthesisConfig
from backend.core.config import get_settings
from backend.core.exceptions import InvalidParameterError
from backend.models.speech_models import Gender, StrategyType
from Logging_Monitoring import ReportCollector, read_reports, setup_logging


@pytest.fixture
def config_file(tmp_path):
    def write(text):
        path = tmp_path / "config.yaml"
        path.write_text(text)
        return str(path)
    return write


class TestConfig:

    def test_sections(self, config_file):
        config = Config(config_file(
            "anonymization:\n  strategy: gender_independent\n  alpha: 0.9\n"
            "pitch:\n  f0_max: 400\nmetrics:\n  n_mfcc: 13\n"
        ))
        cfg = config.anonymization()
        assert cfg.strategy == StrategyType.GENDER_INDEPENDENT
        assert cfg.alpha == 0.9
        assert cfg.pitch.f0_max == 400.0
        assert config.metrics.n_mfcc == 13
        assert config.formant.max_formants == 5

    def test_flags_override_file(self, config_file):
        config = Config(config_file("anonymization:\n  strategy: gender_independent\n  alpha: 0.9\n"))
        cfg = config.anonymization(strategy="gender-dependent", alpha=0.2, noise_seed=None)
        assert cfg.strategy == StrategyType.GENDER_DEPENDENT
        assert cfg.alpha == 0.2

    def test_seed_precedence(self, config_file, monkeypatch):
        monkeypatch.setenv("VOICEGUARD_SEED", "17")
        assert Config(config_file("anonymization:\n  seed: 3\n")).seed == 3
        assert Config(config_file("anonymization:\n  alpha: 0.3\n")).seed == 17
        assert Config(config_file("anonymization:\n  alpha: 0.3\n")).anonymization(noise_seed=5).noise_seed == 5
        monkeypatch.delenv("VOICEGUARD_SEED")
        assert Config(config_file("anonymization:\n  alpha: 0.3\n")).seed == 0
        assert get_settings().seed is None

    def test_environment_placeholders(self, config_file, monkeypatch):
        monkeypatch.setenv("VG_LOG_FILE", "/tmp/voiceguard.log")
        config = Config(config_file("logging:\n  level: DEBUG\n  file: ${VG_LOG_FILE}\n"))
        assert config.logging_config.file == "/tmp/voiceguard.log"
        assert config.logging_config.level == "DEBUG"

    def test_log_level_from_environment(self, config_file, monkeypatch):
        monkeypatch.setenv("VOICEGUARD_LOG_LEVEL", "WARNING")
        assert Config(config_file("logging:\n  level: DEBUG\n")).logging_config.level == "WARNING"

    def test_missing_explicit_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            Config(str(tmp_path / "absent.yaml"))

    def test_non_mapping_section(self, config_file):
        with pytest.raises(InvalidParameterError):
            Config(config_file("pitch: 12\n")).pitch

    def test_get_dotted_key(self, config_file):
        config = Config(config_file("processing:\n  jobs: 2\n"))
        assert config.get("processing.jobs") == 2
        assert config.get("processing.missing", "x") == "x"
        assert config.processing.jobs == 2


class TestModels:

    def test_alpha_validated_per_strategy(self):
        with pytest.raises(ValidationError):
            AnonymizationConfig(strategy="gender_dependent", alpha=1.2)
        with pytest.raises(ValidationError):
            AnonymizationConfig(strategy="gender_independent", alpha=0.0)

    def test_alpha_outside_swept_range_warns(self, log_messages):
        AnonymizationConfig(strategy="gender_independent", alpha=1.8)
        assert any("outside the swept range" in m for m in log_messages)

    def test_gender_labels(self):
        assert AnonymizationConfig(gender="F").gender == Gender.FEMALE
        assert AnonymizationConfig(gender=None).gender == Gender.UNKNOWN

    def test_formant_ceiling_by_gender(self):
        assert FormantConfig().for_gender(Gender.MALE).ceiling_hz == 5000.0
        assert FormantConfig().for_gender(Gender.UNKNOWN).ceiling_hz == 5500.0
        assert FormantConfig().order == 12

    def test_lpc_order_too_low(self):
        with pytest.raises(ValidationError):
            FormantConfig(lpc_order=6)

    def test_synthesis_order_is_capped(self):
        assert SynthesisConfig().order_for(16000) == 18
        assert SynthesisConfig().order_for(48000) == 32


class TestLogging:

    def test_file_sink_carries_utterance_id(self, tmp_path):
        log_file = tmp_path / "run.log"
        setup_logging(LoggingConfig(level="INFO", file=str(log_file)))
        logger.bind(utterance_id="spk00_u01").warning("clipped formants")
        logger.info("plain message")
        logger.debug("hidden")
        logger.complete()
        setup_logging(LoggingConfig())
        text = log_file.read_text()
        assert "[spk00_u01] clipped formants" in text
        assert "plain message" in text
        assert "hidden" not in text


class TestReportCollector:

    def test_manifest_order_and_summary(self, tmp_path):
        collector = ReportCollector(["u1", "u2", "u3"])
        collector.extend([
            {'utterance_id': 'u3', 'status': 'ok'},
            {'utterance_id': 'u1', 'status': 'error', 'error_type': 'MissingGenderError'},
            {'utterance_id': 'u2', 'status': 'ok'},
        ])
        assert [r['utterance_id'] for r in collector.reports] == ["u1", "u2", "u3"]
        assert collector.summary() == {
            'total': 3, 'ok': 2, 'errors': 1, 'error_types': {'MissingGenderError': 1},
        }
        path = collector.write(tmp_path / "reports.jsonl")
        assert read_reports(path) == collector.reports
        assert json.loads(path.read_text().splitlines()[0])['utterance_id'] == "u1"

    def test_empty(self, tmp_path):
        collector = ReportCollector([])
        path = collector.write(tmp_path / "reports.jsonl")
        assert path.read_text() == ""
        assert collector.summary()['total'] == 0
