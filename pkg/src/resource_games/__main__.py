import logging
import re
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator

import typer

from .config import DEFAULT_SETTINGS, configure_logging
from .exceptions import (
    OracleError,
    ParseError,
    ResourceGameError,
    SemiringError,
    StrategyError,
    UndefinedStrategyError,
    UnfoldLimitError,
    UnsupportedModelError,
    ValidationError,
)
from .extent import extent_fig1, extent_generic
from .model import NATURAL, Model, is_automaton, is_buchi, load_model
from .oracle import DEFAULT_PROFILE, get_profile, oracle_batch
from .resource_game import build_resource_game
from .runs import check_annotation, configurations, is_accepting, parse_run, run_value, unfold, validate_run
from .semiring import render_number
from .strategy import RandomAdversary, ReducedStrategy, carry_over, parse_strategy, synth_fig2, worst_adversary

logger = logging.getLogger(__name__)

app = typer.Typer(help="Resource-aware parity automata and games")

_EXIT_CODES = (
    (UndefinedStrategyError, 4),
    (UnfoldLimitError, 4),
    (ParseError, 2),
    (ValidationError, 2),
    (StrategyError, 2),
    (UnsupportedModelError, 3),
    (SemiringError, 3),
    (OracleError, 1),
)


def _exit_code(e: ResourceGameError) -> int:
    for cls, code in _EXIT_CODES:
        if isinstance(e, cls):
            return code
    return 1


@contextmanager
def _reporting() -> Iterator[None]:
    try:
        yield
    except ResourceGameError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(_exit_code(e)) from None


def _flag(value: bool) -> str:
    return "true" if value else "false"


def _read(path: Path, what: str) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Failed to read {what} file {path}: {e}")
        raise ParseError(f"Cannot read {what} file {path}: {e}") from e


class InteractiveAdversary:
    """∀ player asking on the terminal; invalid answers are asked again."""

    def __call__(self, state: str, memory, options: tuple[str, ...]) -> str:
        typer.echo(f"∀ to move at ({state},{render_number(memory)}):")
        for index, option in enumerate(options, start=1):
            typer.echo(f"  {index}. {option}")
        while True:
            answer = typer.prompt("option", err=True).strip()
            if re.fullmatch(NATURAL, answer) and 1 <= int(answer) <= len(options):
                return options[int(answer) - 1]
            typer.echo(f"Enter a number between 1 and {len(options)}", err=True)


def _adversary(spec: str, m: Model, strategy: ReducedStrategy):
    if is_automaton(m):
        return None
    if spec == "worst":
        return worst_adversary(m, strategy.extents)
    if spec == "interactive":
        return InteractiveAdversary()
    kind, _, seed = spec.partition(":")
    if kind == "random" and re.fullmatch(NATURAL, seed):
        return RandomAdversary(int(seed))
    raise typer.BadParameter(f"expected worst, random:<seed> or interactive, got {spec!r}", param_hint="--adversary")


def _play(m: Model, strategy: ReducedStrategy, start: str, mem: str, steps: int, adversary) -> None:
    if not re.fullmatch(NATURAL, mem):
        raise typer.BadParameter(f"expected a natural number, got {mem!r}", param_hint="--mem")
    memory = int(mem)
    if not m.has_state(start):
        raise ValidationError(f"Unknown state '{start}'")
    try:
        z, a = unfold(m, carry_over(m, strategy.skeleton()), start, memory, adversary, max_nodes=steps)
    except UnfoldLimitError as e:
        typer.echo("".join(f"({q},{render_number(n)})" for q, n in e.reached))
        typer.echo(f"INCOMPLETE steps={steps}")
        return
    typer.echo("".join(f"({q},{render_number(n)})" for q, n in configurations(z, a)))
    verdict = "ACCEPTING" if is_accepting(m, z) else "REJECTING"
    typer.echo(f"{verdict} value={run_value(m, z)}")


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress at INFO level"),
    log_file: str | None = typer.Option(None, "--log-file", help="Also write the log to this file"),
):
    """Solve, synthesize and check resource-aware parity automata and games."""
    configure_logging(verbose, log_file)


@app.command()
def check(model: Path = typer.Argument(..., help="Model file")):
    """Parse and validate a model"""
    with _reporting():
        m = load_model(str(model))
        typer.echo(
            f"states={len(m.states)} transitions={m.transition_count()} "
            f"automaton={_flag(is_automaton(m))} buchi={_flag(is_buchi(m))} "
            f"parities={','.join(str(p) for p in m.parities)}"
        )


@app.command()
def extent(
    model: Path = typer.Argument(..., help="Model file"),
    engine: str = typer.Option("generic", "--engine", help="generic or fig1"),
):
    """Print the extent of every state"""
    if engine not in ("generic", "fig1"):
        raise typer.BadParameter(f"unknown engine {engine!r}", param_hint="--engine")
    with _reporting():
        m = load_model(str(model))
        ext = extent_generic(m) if engine == "generic" else extent_fig1(m)[0]
        typer.echo(ext.render(), nl=False)


@app.command()
def synth(
    model: Path = typer.Argument(..., help="Model file"),
    out: Path | None = typer.Option(None, "--out", help="Write the strategy file here"),
):
    """Synthesize a reduced strategy for a Büchi model"""
    with _reporting():
        m = load_model(str(model))
        strategy, _ = synth_fig2(m)
        if out is not None:
            out.write_text(strategy.render(), encoding="utf-8")
            logger.info(f"Strategy written to {out}")
        else:
            typer.echo(strategy.render(), nl=False)
        typer.echo(strategy.table(), nl=False)


@app.command()
def value(
    model: Path = typer.Argument(..., help="Model file"),
    run: Path = typer.Argument(..., help="Run file"),
):
    """Evaluate a regular run and check its annotation, if any"""
    with _reporting():
        m = load_model(str(model))
        z, annotation = parse_run(_read(run, "run"))
        validate_run(m, z)
        typer.echo(f"value={run_value(m, z)}")
        typer.echo(f"accepting={_flag(is_accepting(m, z))}")
        if annotation is not None:
            ok = check_annotation(m, z, annotation, extent_generic(m))
            typer.echo(f"annotation={'ok' if ok else 'invalid'}")


@app.command()
def simulate(
    model: Path = typer.Argument(..., help="Model file"),
    strategy: Path = typer.Argument(..., help="Strategy file"),
    start: str = typer.Option(..., "--from", help="Initial state"),
    mem: str = typer.Option(..., "--mem", help="Initial resources"),
    steps: int = typer.Option(DEFAULT_SETTINGS.unfold_max_nodes, "--steps", help="Configuration budget"),
    adversary: str = typer.Option("worst", "--adversary", help="worst, random:<seed> or interactive"),
):
    """Play a strategy file from one configuration until the play closes a cycle"""
    with _reporting():
        m = load_model(str(model))
        reduced = parse_strategy(_read(strategy, "strategy"), m)
        _play(m, reduced, start, mem, steps, _adversary(adversary, m, reduced))


@app.command()
def play(
    model: Path = typer.Argument(..., help="Model file"),
    start: str = typer.Option(..., "--from", help="Initial state"),
    mem: str = typer.Option(..., "--mem", help="Initial resources"),
    steps: int = typer.Option(DEFAULT_SETTINGS.unfold_max_nodes, "--steps", help="Configuration budget"),
):
    """Synthesize a strategy and play it against you as ∀"""
    with _reporting():
        m = load_model(str(model))
        reduced, _ = synth_fig2(m)
        _play(m, reduced, start, mem, steps, _adversary("interactive", m, reduced))


@app.command()
def game(model: Path = typer.Argument(..., help="Model file")):
    """Dump the resource game built from the extents"""
    with _reporting():
        m = load_model(str(model))
        typer.echo(build_resource_game(m, extent_generic(m)).dump(), nl=False)


def _seed_range(text: str) -> range:
    first, sep, last = text.partition("..")
    if not sep or not re.fullmatch(NATURAL, first) or not re.fullmatch(NATURAL, last):
        raise typer.BadParameter(f"expected a..b, got {text!r}", param_hint="--seeds")
    return range(int(first), int(last) + 1)


@app.command("oracle-check")
def oracle_check(
    seeds: str = typer.Option("1..100", "--seeds", help="Inclusive seed range a..b"),
    profile: str = typer.Option(DEFAULT_PROFILE, "--profile", help="Random model profile"),
    enumerate_nodes: int = typer.Option(0, "--enumerate", help="Also search witness runs up to this many nodes"),
):
    """Compare the extent engines with the brute-force oracle on random models"""
    try:
        get_profile(profile)
    except OracleError as e:
        raise typer.BadParameter(str(e), param_hint="--profile") from None
    with _reporting():
        report = oracle_batch(_seed_range(seeds), profile, enumerate_nodes=enumerate_nodes)
        typer.echo(report.render(), nl=False)
        if not report.ok:
            typer.echo(f"Error: oracle disagreement on seeds {' '.join(map(str, report.failures))}", err=True)
            raise typer.Exit(1)


if __name__ == "__main__":
    app()
