"""Command-line interface for rieszbound."""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Any, NoReturn

import asyncclick as click

from rieszbound.cli.formatters import (
    format_molien_table,
    format_oracle,
    format_problem_summary,
    format_run_report,
    format_solve_outcome,
    format_verification,
)
from rieszbound.commanders import RieszBoundCommander
from rieszbound.domain.exceptions import (
    ConfigError,
    RieszBoundError,
    SolverError,
    StageError,
    VerificationFailedError,
)

logger = logging.getLogger('rieszbound')

EXIT_FAILURE = 1
EXIT_VERIFICATION = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4

#: Command-line flags that map one-to-one onto configuration keys.
CONFIG_FLAGS = (
    's',
    'n_particles',
    'd',
    'delta',
    'precision_bits',
    'upper_bound',
    'u_threshold',
    'm_bound',
    'solver_cmd',
    'solver_family',
    'symmetry',
    'seed',
    'workdir',
    'digits',
    'samples',
    'pair_form',
)


def exit_code(error: Exception) -> int:
    """Exit code documented for an error, looking through stage labels."""
    while isinstance(error, StageError):
        error = error.cause
    if isinstance(error, ConfigError):
        return EXIT_CONFIG
    if isinstance(error, VerificationFailedError):
        return EXIT_VERIFICATION
    if isinstance(error, SolverError):
        return EXIT_SOLVER
    return EXIT_FAILURE


def fail(error: Exception) -> NoReturn:
    """Print an error to stderr and exit with its code."""
    click.echo(f'Error: {error}', err=True)
    sys.exit(exit_code(error))


def configure_logging(verbose: int, quiet: bool) -> None:  # noqa: FBT001
    """Send package logs to the current stderr at the requested level."""
    if quiet:
        level = logging.ERROR
    else:
        level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False


async def load_commander(ctx: click.Context) -> RieszBoundCommander:
    """Build the commander from the group options."""
    return await RieszBoundCommander.from_sources(ctx.obj['config_path'], ctx.obj['overrides'])


@click.group()
@click.option('-v', '--verbose', count=True, help='Log progress to stderr (-vv for debug detail)')
@click.option('-q', '--quiet', is_flag=True, help='Log errors only')
@click.option(
    '--config',
    'config_path',
    type=click.Path(exists=False, dir_okay=False, path_type=Path),
    help='Configuration file of key = value lines',
)
@click.option('--s', 's', type=int, help='Riesz exponent s')
@click.option('--n-particles', type=int, help='Number of points N')
@click.option('--d', 'd', type=int, help='Truncation degree of the kernel')
@click.option('--delta', type=int, help='SOS degree for triples and quadruples')
@click.option('--precision-bits', type=int, help='Working precision in bits')
@click.option('--upper-bound', type=float, help='Energy upper bound B used to derive U')
@click.option('--u-threshold', type=float, help='Explicit inner-product threshold U')
@click.option('--m-bound', type=float, help='Bound on each half of a split free variable')
@click.option('--solver-cmd', help='Solver command with {input} and {output} placeholders')
@click.option('--solver-family', type=click.Choice(['csdp', 'sdpa']), help='Solver output dialect')
@click.option('--symmetry/--no-symmetry', default=None, help='Use symmetry-reduced SOS blocks')
@click.option('--seed', type=int, help='Seed for sampling and random containers')
@click.option('--workdir', type=click.Path(file_okay=False, path_type=Path), help='Root of instance workspaces')
@click.option('--digits', type=int, help='Significant digits in SDPA files')
@click.option('--samples', type=int, help='Independent sets sampled per cardinality (0 disables)')
@click.option('--pair-form', type=click.Choice(['auto', 'w', 'u']), help='Form of the two-point constraint')
@click.pass_context
def rbound(ctx: click.Context, verbose: int, quiet: bool, config_path: Path | None, **flags: Any) -> None:  # noqa: FBT001
    """rieszbound - SDP lower bounds for Riesz energies on the sphere.

    Generates the semidefinite relaxations for N points on the 2-sphere,
    writes them in SDPA-sparse format, runs an external solver and checks
    the bound against known configurations.

    \b
    Examples:
        \b
        # Five points, s = 1, the smallest relaxation
        rbound --d 0 --delta 2 run

    \b
        # Reuse a configuration file and override one value
        rbound --config sharp.txt --delta 6 run

    """
    configure_logging(verbose, quiet)
    overrides = {key: flags[key] for key in CONFIG_FLAGS}
    ctx.obj = {'config_path': config_path, 'overrides': overrides}


@rbound.command()
@click.pass_context
async def generate(ctx: click.Context) -> None:
    """Assemble, prune and write the SDPA-sparse file.

    Writing is idempotent: an unchanged file is left untouched.

    \b
    Examples:
        \b
        rbound --s 2 --d 2 --delta 4 generate

    """
    try:
        commander = await load_commander(ctx)
        generated = await commander.generate()
        click.echo(format_problem_summary(generated.summary), nl=False)
    except (RieszBoundError, OSError) as e:
        fail(e)


@rbound.command()
@click.pass_context
async def solve(ctx: click.Context) -> None:
    """Generate if needed, then run the external solver.

    \b
    Examples:
        \b
        rbound --solver-cmd "sdpa -ds {input} -o {output}" solve

    """
    try:
        commander = await load_commander(ctx)
        outcome = await commander.solve()
        click.echo(format_solve_outcome(outcome), nl=False)
    except (RieszBoundError, OSError) as e:
        fail(e)


@rbound.command()
@click.option('--bound', type=float, help='Bound to check; the stored solver result when omitted')
@click.pass_context
async def verify(ctx: click.Context, bound: float | None) -> None:
    """Compare a bound with the reference energies.

    Exits with code 2 when the bound is not safe.

    \b
    Examples:
        \b
        rbound verify --bound 6.4746

    """
    try:
        commander = await load_commander(ctx)
        report = await commander.verify(bound)
        click.echo(format_verification(report), nl=False)
        report.require_passed()
    except (RieszBoundError, OSError) as e:
        fail(e)


@rbound.command()
@click.pass_context
async def run(ctx: click.Context) -> None:
    """Run generate, prune, emit, solve and verify.

    Prints the report and writes it to the instance workspace. Exits with
    code 2 when verification fails.

    \b
    Examples:
        \b
        rbound -v --d 6 --delta 6 run

    """
    try:
        commander = await load_commander(ctx)
        report = await commander.run()
        click.echo(format_run_report(report), nl=False)
        report.verification.require_passed()
    except (RieszBoundError, OSError) as e:
        fail(e)


@rbound.command()
@click.option('--i', 'i', type=int, default=4, show_default=True, help='Points of the constraint (3 or 4)')
@click.option('--delta-min', type=int, default=0, show_default=True, help='Smallest SOS degree')
@click.option('--delta-max', type=int, default=20, show_default=True, help='Largest SOS degree')
@click.option('--full', is_flag=True, help='List every isotypic block size')
@click.pass_context
async def molien(ctx: click.Context, i: int, delta_min: int, delta_max: int, full: bool) -> None:  # noqa: FBT001
    """Tabulate SOS block sizes with and without symmetry reduction.

    \b
    Examples:
        \b
        rbound molien --delta-max 8 --full

    """
    try:
        commander = await load_commander(ctx)
        rows = await commander.molien(i, delta_min, delta_max)
        click.echo(format_molien_table(rows, full=full))
    except ValueError as e:
        fail(ConfigError(str(e)))
    except (RieszBoundError, OSError) as e:
        fail(e)


@rbound.command()
@click.option('--points', 'n', type=int, default=8, show_default=True, help='Container size')
@click.option('--choose', 'N', type=int, default=3, show_default=True, help='Points to choose')
@click.option('--t', 't', type=int, help='Relaxation level (default: the number of points chosen)')
@click.option('--adjacency', type=float, help='Exclude pairs with inner product at least this')
@click.option('--no-solve', is_flag=True, help='Only emit the problem and enumerate')
@click.pass_context
async def oracle(
    ctx: click.Context,
    n: int,
    N: int,  # noqa: N803
    t: int | None,
    adjacency: float | None,
    no_solve: bool,  # noqa: FBT001
) -> None:
    """Compare the finite moment relaxation with brute force on random points.

    \b
    Examples:
        \b
        rbound --seed 7 oracle --points 8 --choose 3

    """
    try:
        commander = await load_commander(ctx)
        report = await commander.oracle(n, N, N if t is None else t, adjacency, solve=not no_solve)
        click.echo(format_oracle(report), nl=False)
    except (RieszBoundError, OSError) as e:
        fail(e)


def main() -> None:
    """Entry point for the CLI."""
    rbound()


if __name__ == '__main__':  # pragma: no cover
    main()
