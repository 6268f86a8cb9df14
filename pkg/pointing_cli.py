import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import click

from PointingLab.plugins import config as run_config
from PointingLab.plugins.curves_plugin import CurvesPlugin
from PointingLab.plugins.outage_plugin import OutagePlugin
from PointingLab.plugins.output import Table, emit, render_summary
from PointingLab.plugins.validate_plugin import ValidatePlugin
from PointingLab.services.channel import E2EMethod
from PointingLab.settings import settings as app_settings

logger = logging.getLogger("pointing_cli")

EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_NUMERIC = 4


class ValidationFailure(click.ClickException):
    exit_code = EXIT_VALIDATION


class NumericFailure(click.ClickException):
    exit_code = EXIT_NUMERIC


@dataclass
class CliState:
    preset: Optional[str]
    config: Optional[str]
    seed: Optional[int]
    samples: Optional[int]
    out: Optional[str]
    fmt: str


def configure_logging(level: Optional[str]) -> None:
    """Configure the root handler once per invocation; stdout stays reserved for data."""
    logging.basicConfig(
        level=(level or app_settings.LOG_LEVEL).upper(),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def load_run_config(state: CliState) -> run_config.RunConfig:
    ok, cfg = run_config.resolve_config(
        preset=state.preset,
        path=state.config,
        seed=state.seed,
        samples=state.samples,
        output=state.out,
    )
    if not ok:
        raise click.UsageError(cfg)
    logger.info("Running %s", cfg.name)
    return cfg


def run_command(state: CliState, action: Callable[[run_config.RunConfig], Table]) -> run_config.RunConfig:
    """Load the configuration, run ``action`` and write its table.

    Configuration problems exit with code 2 and numeric failures with code 4.
    """
    cfg = load_run_config(state)
    try:
        table = action(cfg)
    except ArithmeticError as e:
        raise NumericFailure(f"Numeric failure: {e}") from e
    except ValueError as e:
        raise click.UsageError(str(e)) from e
    emit(table, cfg, state.fmt, cfg.output, click.get_text_stream("stdout"))
    return cfg


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Run configuration (JSON).")
@click.option("--preset", help="Name of a frozen preset (see `presets`).")
@click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), help="Monte-Carlo seed override.")
@click.option("--samples", type=click.IntRange(min=1000), help="Monte-Carlo sample count override.")
@click.option("--out", type=click.Path(dir_okay=False), help="Output file; stdout when omitted.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.pass_context
def cli(ctx, config_path, preset, seed, samples, out, fmt, log_level):
    """Pointing-error and end-to-end channel models for directional mmWave/THz links."""
    configure_logging(log_level)
    ctx.obj = CliState(preset=preset, config=config_path, seed=seed, samples=samples, out=out, fmt=fmt)


@cli.command()
@click.option("--node", type=click.Choice(["tx", "rx"]), default="tx", show_default=True)
@click.pass_obj
def pattern(state: CliState, node: str):
    """Gain of the exact array pattern over a (theta, phi) grid."""
    run_command(state, lambda cfg: CurvesPlugin(cfg).pattern(node))


@cli.command("pointing")
@click.option("--points", type=click.IntRange(min=1), help="Grid size over h_p / G0 in (0, 1].")
@click.option("--mc-overlay/--no-mc-overlay", default=None, help="Add Monte-Carlo ECDF and histogram columns.")
@click.pass_obj
def pointing_cmd(state: CliState, points: Optional[int], mc_overlay: Optional[bool]):
    """PDF and CDF of the pointing-error gain."""
    run_command(state, lambda cfg: CurvesPlugin(cfg).pointing(points, mc_overlay))


@cli.command()
@click.option("--method", type=click.Choice([m.value for m in E2EMethod]), help="End-to-end evaluator.")
@click.option("--points", type=click.IntRange(min=1))
@click.option("--mc-overlay/--no-mc-overlay", default=None)
@click.pass_obj
def e2e(state: CliState, method: Optional[str], points: Optional[int], mc_overlay: Optional[bool]):
    """PDF and CDF of the end-to-end channel gain."""
    run_command(state, lambda cfg: CurvesPlugin(cfg).e2e(points, method, mc_overlay))


@cli.command()
@click.pass_obj
def outage(state: CliState):
    """Outage probability versus link length, or versus array size."""
    run_command(state, lambda cfg: OutagePlugin(cfg).run())


@cli.command()
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Write the JSON report here.")
@click.pass_obj
def validate(state: CliState, report_path: Optional[str]):
    """Analytic forms against the Monte-Carlo oracle and each other."""
    holder = {}

    def action(cfg: run_config.RunConfig) -> Table:
        holder["report"] = ValidatePlugin(cfg).run()
        return holder["report"].to_table()

    run_command(state, action)
    report = holder["report"]
    if report_path:
        path = Path(report_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_summary(report.to_dict()))
        logger.info("Validation report written to %s", path)
    if not report.passed:
        raise ValidationFailure("Validation failed: " + ", ".join(c.name for c in report.failed))


@cli.command()
@click.argument("name", required=False)
def presets(name: Optional[str]):
    """List the frozen presets, or print one resolved preset."""
    if name is None:
        for preset in run_config.list_presets():
            click.echo(preset)
        return
    ok, cfg = run_config.load_preset(name)
    if not ok:
        raise click.UsageError(cfg)
    click.echo(run_config.echo_document(cfg), nl=False)


def main() -> None:
    cli(prog_name="pointing_cli")


if __name__ == "__main__":
    main()
