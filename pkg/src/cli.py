"""
Command-line front end
Thin click commands over QuotientPipeline; JSON on stdout, JSON logs on stderr
"""

import sys
from fractions import Fraction
from typing import Callable, List, Optional, Tuple, Union

import click
import yaml

from src.main import DEFAULT_CONFIG, QuotientPipeline, resolve_config
from src.parser import ParseError
from src.quotient import BoundExhaustedError, ChartNotCertifiedError, CocycleError, RecognitionError
from src.report import ErrorReport, Report, render


EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_BOUND = 3

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']

Action = Callable[[QuotientPipeline], Tuple[Union[Report, str], int]]


def _emit(ctx: click.Context, document: Union[Report, str]) -> None:
    text = document if isinstance(document, str) else render(document)
    output = ctx.obj.get("output")
    if output:
        with open(output, "w") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


def _fail(ctx: click.Context, problem: str, error: Exception, code: int, position: Optional[int] = None) -> None:
    report = ErrorReport(problem=problem, error=type(error).__name__, message=str(error), position=position)
    click.echo(render(report), err=True, nl=False)
    ctx.exit(code)


def _run(ctx: click.Context, problem: str, action: Action) -> None:
    try:
        config = resolve_config(ctx.obj["config_path"])
        with QuotientPipeline(problem, config, ctx.obj["log_level"]) as pipeline:
            document, code = action(pipeline)
    except ParseError as e:
        _fail(ctx, problem, e, EXIT_INPUT, e.position)
        return
    except ChartNotCertifiedError as e:
        _fail(ctx, problem, e, EXIT_NEGATIVE)
        return
    except (BoundExhaustedError, RecognitionError, CocycleError) as e:
        _fail(ctx, problem, e, EXIT_BOUND)
        return
    except (FileNotFoundError, ValueError, yaml.YAMLError) as e:
        _fail(ctx, problem, e, EXIT_INPUT)
        return
    _emit(ctx, document)
    ctx.exit(code)


def _floats(text: str, count: int) -> List[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"expected {count} comma-separated numbers") from None
    if len(values) != count:
        raise click.BadParameter(f"expected {count} comma-separated numbers")
    return values


@click.group()
@click.option('--config', 'config_path', default=DEFAULT_CONFIG, type=click.Path(dir_okay=False),
              help='Configuration file (defaults apply when config.yaml is absent)')
@click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None,
              help='Override the configured log level')
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None,
              help='Write the result document to a file instead of stdout')
@click.pass_context
def cli(ctx: click.Context, config_path: str, log_level: Optional[str], output: Optional[str]) -> None:
    """Quotients of affine varieties by algebraic foliations"""
    ctx.ensure_object(dict)
    ctx.obj.update(config_path=config_path, log_level=log_level, output=output)


@cli.command()
@click.argument('problem', type=click.Path(dir_okay=False))
@click.pass_context
def involutive(ctx: click.Context, problem: str) -> None:
    """Decide whether the distribution is closed under the Lie bracket"""
    def action(pipeline: QuotientPipeline):
        report = pipeline.involutivity()
        return report, EXIT_OK if report.verdict.status in ("yes", "yes-generically") else EXIT_NEGATIVE
    _run(ctx, problem, action)


@cli.command('first-integrals')
@click.argument('problem', type=click.Path(dir_okay=False))
@click.option('--chart', default=None, help='Chart index or denominator expression; whole space when omitted')
@click.option('--degree', type=click.IntRange(min=0), default=None, help='Degree bound D')
@click.pass_context
def first_integrals(ctx: click.Context, problem: str, chart: Optional[str], degree: Optional[int]) -> None:
    """Generators and relations of the first integrals up to a degree bound"""
    _run(ctx, problem, lambda pipeline: (pipeline.first_integrals(chart, degree), EXIT_OK))


@cli.command()
@click.argument('problem', type=click.Path(dir_okay=False))
@click.option('--map', 'map_path', required=True, type=click.Path(dir_okay=False),
              help='JSON file with source variables and their images')
@click.pass_context
def invariance(ctx: click.Context, problem: str, map_path: str) -> None:
    """Check that a ring map into the problem ring is invariant"""
    def action(pipeline: QuotientPipeline):
        report = pipeline.invariance(map_path)
        return report, EXIT_OK if report.verdict.status == "yes" else EXIT_NEGATIVE
    _run(ctx, problem, action)


@cli.command()
@click.argument('problem', type=click.Path(dir_okay=False))
@click.option('--chart', default="0", show_default=True, help='Chart index')
@click.pass_context
def stability(ctx: click.Context, problem: str, chart: str) -> None:
    """Certify or refute stability of a chart"""
    def action(pipeline: QuotientPipeline):
        report = pipeline.stability(chart)
        return report, EXIT_OK if report.certificate.overall == "verified" else EXIT_NEGATIVE
    _run(ctx, problem, action)


@cli.command()
@click.argument('problem', type=click.Path(dir_okay=False))
@click.pass_context
def quotient(ctx: click.Context, problem: str) -> None:
    """Glue the problem's charts into an atlas of the quotient"""
    def action(pipeline: QuotientPipeline):
        report = pipeline.quotient()
        glued = report.cocycle_ok and report.separated.status != "no"
        return report, EXIT_OK if glued else EXIT_NEGATIVE
    _run(ctx, problem, action)


@cli.command()
@click.argument('problem', type=click.Path(dir_okay=False))
@click.option('--chart', default="0", show_default=True, help='Chart index')
@click.option('--point', required=True, help='Values of the chart generators, "c1,c2,.."')
@click.pass_context
def leaf(ctx: click.Context, problem: str, chart: str, point: str) -> None:
    """Fibre of a chart over a rational point, with its leaf report"""
    def action(pipeline: QuotientPipeline):
        values = [Fraction(v.strip()) for v in point.split(",") if v.strip()]
        report = pipeline.leaf(chart, values)
        return report, EXIT_OK if report.leaf else EXIT_NEGATIVE
    _run(ctx, problem, action)


@cli.command()
@click.argument('problem', type=click.Path(dir_okay=False))
@click.option('--window', default=None, help='x0,x1,y0,y1')
@click.option('--density', type=click.IntRange(min=2, max=200), default=None, help='Arrows per axis')
@click.pass_context
def plot(ctx: click.Context, problem: str, window: Optional[str], density: Optional[int]) -> None:
    """SVG phase portrait of a two-variable problem"""
    bounds = _floats(window, 4) if window else None
    _run(ctx, problem, lambda pipeline: (pipeline.plot(bounds, density), EXIT_OK))


def main() -> None:
    """Main entry point"""
    cli(prog_name="foliation", obj={})


if __name__ == "__main__":
    sys.exit(main())
