"""
VoiceGuard command line
Batch anonymization, evaluation, factor sweeps and the synthetic desk corpus
"""

import functools
import sys
from pathlib import Path
from typing import Callable, List, Optional

import click
from loguru import logger
from pydantic import ValidationError

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from backend import __version__
from backend.config import Config
from backend.core.exceptions import InvalidParameterError, VoiceGuardError
from backend.models.speech_models import StrategyType
from Data_Engine.desk_corpus import generate_corpus
from Data_Engine.manifest import load_manifest, load_trials, write_trials
from Evaluation.verification import build_trials
from Logging_Monitoring import setup_logging
from main_orchestrator import MainOrchestrator, SweepSpec

STRATEGY_CHOICE = click.Choice(['gender-independent', 'gender-dependent'], case_sensitive=False)


def _configure(config_path: Optional[Path]) -> Config:
    """Load the YAML config and install the log sinks"""
    try:
        config = Config(str(config_path) if config_path is not None else None)
    except FileNotFoundError as e:
        raise click.BadParameter(str(e), param_hint="--config") from None
    setup_logging(config.logging_config)
    return config


def _orchestrator(ctx: click.Context, config: Config, jobs: Optional[int]) -> MainOrchestrator:
    return MainOrchestrator(
        jobs=jobs if jobs is not None else config.processing.jobs,
        progress=ctx.obj['progress'],
    )


def _parse_alphas(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise click.BadParameter(f"'{text}' is not a comma-separated list of numbers", param_hint="--alphas") from None


def handle_errors(func: Callable) -> Callable:
    """Map configuration problems to usage errors (exit 2) and run failures to exit 1"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (InvalidParameterError, ValidationError) as e:
            raise click.UsageError(str(e)) from None
        except VoiceGuardError as e:
            logger.error(f"{type(e).__name__}: {e}")
            raise click.ClickException(f"{type(e).__name__}: {e}") from None

    return wrapper


def common_options(func: Callable) -> Callable:
    func = click.option('--jobs', type=int, default=None, help='Worker count; -1 uses every core.')(func)
    func = click.option(
        '--config', 'config_path', type=click.Path(exists=True, dir_okay=False, path_type=Path),
        default=None, help='YAML configuration file (default: config.yaml or VOICEGUARD_CONFIG).',
    )(func)
    return func


@click.group()
@click.option('--progress/--no-progress', default=True, help='Show progress bars.')
@click.version_option(version=__version__, prog_name="voiceguard")
@click.pass_context
def cli(ctx: click.Context, progress: bool):
    """VoiceGuard: formant and F0 scaling speaker anonymization."""
    ctx.ensure_object(dict)
    ctx.obj['progress'] = progress


@cli.command()
@click.option('--manifest', type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option('--out', type=click.Path(file_okay=False, path_type=Path), required=True,
              help='Directory for <utterance_id>.wav and reports.jsonl.')
@click.option('--strategy', type=STRATEGY_CHOICE, default=None)
@click.option('--alpha', type=float, default=None)
@click.option('--seed', type=int, default=None, help='Unvoiced excitation seed.')
@common_options
@click.pass_context
@handle_errors
def anonymize(ctx, manifest, out, strategy, alpha, seed, jobs, config_path):
    """Anonymize every utterance of a manifest."""
    config = _configure(config_path)
    cfg = config.anonymization(strategy=strategy, alpha=alpha, noise_seed=seed)
    batch = _orchestrator(ctx, config, jobs).anonymize_corpus(load_manifest(manifest), cfg, out)
    if batch.n_errors:
        ctx.exit(1)


@cli.command()
@click.option('--manifest', type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option('--anon-dir', type=click.Path(exists=True, file_okay=False, path_type=Path), required=True)
@click.option('--trials', type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help='Trial list; derived from the manifest when omitted.')
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), required=True,
              help='Metrics JSON; companion tables are written next to it.')
@common_options
@click.pass_context
@handle_errors
def evaluate(ctx, manifest, anon_dir, trials, out, jobs, config_path):
    """Compute EER, rho_F0 and G_vd of an anonymized corpus."""
    config = _configure(config_path)
    result = _orchestrator(ctx, config, jobs).evaluate_corpus(
        load_manifest(manifest),
        anon_dir,
        out,
        config.metrics,
        config.pitch,
        load_trials(trials) if trials is not None else None,
    )
    if result.n_failed:
        logger.error(f"{result.n_failed} utterances could not be fully analyzed")
        ctx.exit(1)


@cli.command()
@click.option('--manifest', type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option('--out', type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option('--strategy', type=STRATEGY_CHOICE, default=None)
@click.option('--alphas', type=str, default=None, help='Comma-separated factors, e.g. 0.5,0.7,0.9.')
@click.option('--alpha-start', type=float, default=None)
@click.option('--alpha-stop', type=float, default=None)
@click.option('--alpha-step', type=float, default=None)
@click.option('--metrics', 'metric_names', type=str, default='eer_pct,rho_f0,g_vd',
              help='Columns of sweep.csv.')
@click.option('--trials', type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option('--seed', type=int, default=None)
@common_options
@click.pass_context
@handle_errors
def sweep(ctx, manifest, out, strategy, alphas, alpha_start, alpha_stop, alpha_step,
          metric_names, trials, seed, jobs, config_path):
    """Anonymize and evaluate a corpus over a list of factors."""
    config = _configure(config_path)
    ranged = (alpha_start, alpha_stop, alpha_step)
    if alphas is not None and any(v is not None for v in ranged):
        raise click.UsageError("Use either --alphas or --alpha-start/--alpha-stop/--alpha-step")
    if alphas is not None:
        alpha_list = _parse_alphas(alphas)
    elif all(v is not None for v in ranged):
        alpha_list = SweepSpec.alpha_range(*ranged)
    else:
        raise click.UsageError("Give --alphas or all of --alpha-start, --alpha-stop and --alpha-step")

    cfg = config.anonymization(strategy=strategy, alpha=alpha_list[0] if alpha_list else None, noise_seed=seed)
    spec = SweepSpec(
        strategy=StrategyType.parse(strategy) if strategy else cfg.strategy,
        alphas=alpha_list,
        out_dir=out,
        metrics=tuple(m.strip() for m in metric_names.split(',') if m.strip()),
    )
    orchestrator = _orchestrator(ctx, config, jobs)
    table = orchestrator.sweep(
        load_manifest(manifest),
        spec,
        cfg,
        config.metrics,
        load_trials(trials) if trials is not None else None,
    )
    click.echo(table.to_string(index=False))
    if orchestrator.sweep_errors:
        logger.error(f"Sweep recorded {orchestrator.sweep_errors} errors")
        ctx.exit(1)


@cli.command('gen-corpus')
@click.option('--out', type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option('--speakers', type=click.IntRange(min=2), default=None)
@click.option('--utterances', type=click.IntRange(min=2), default=None)
@click.option('--seed', type=int, default=None)
@click.option('--speaker-prefix', type=str, default=None)
@click.option('--duration', type=click.FloatRange(min=0.5, min_open=True), default=None,
              help='Utterance length in seconds.')
@click.option('--sample-rate', type=click.IntRange(min=8000), default=None)
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@handle_errors
def gen_corpus(out, speakers, utterances, seed, speaker_prefix, duration, sample_rate, config_path):
    """Write a seeded synthetic multi-speaker corpus with manifest.csv and trials.csv."""
    config = _configure(config_path)
    overrides = {
        'speakers': speakers,
        'utterances': utterances,
        'speaker_prefix': speaker_prefix,
        'duration_s': duration,
        'sample_rate': sample_rate,
    }
    corpus_cfg = config.corpus.model_copy(update={k: v for k, v in overrides.items() if v is not None})
    manifest = generate_corpus(out, corpus_cfg, seed if seed is not None else config.seed)
    write_trials(build_trials(manifest), out / "trials.csv")
    click.echo(f"{len(manifest)} utterances of {len(manifest.speakers)} speakers written to {out}")


@cli.command()
@click.option('--manifest', type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option('--out', type=click.Path(file_okay=False, path_type=Path), required=True)
@common_options
@click.pass_context
@handle_errors
def extract(ctx, manifest, out, jobs, config_path):
    """Dump pitch and formant tracks as CSV."""
    config = _configure(config_path)
    collector = _orchestrator(ctx, config, jobs).extract_tracks(
        load_manifest(manifest), out, config.pitch, config.formant
    )
    if collector.errors:
        ctx.exit(1)


if __name__ == "__main__":
    cli(obj={})
