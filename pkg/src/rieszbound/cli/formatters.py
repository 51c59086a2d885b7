"""Output formatters for CLI commands."""

from __future__ import annotations

from typing import TYPE_CHECKING

from rieszbound.domain.entities import key_value_text
from rieszbound.use_cases.molien_table import TABLE_FAMILIES

if TYPE_CHECKING:
    from rieszbound.domain.entities import OracleReport, ProblemSummary, RunReport, VerificationReport
    from rieszbound.use_cases.molien_table import BlockSizeRow
    from rieszbound.use_cases.solve_problem import SolveOutcome

COLUMN_TITLES = {'Q': 'Q4', 'minor2': 'Q4,2,g', 'minor3': 'Q4,3,g'}


def format_problem_summary(summary: ProblemSummary) -> str:
    """Format the result of the generate command.

    Args:
        summary: Summary of the emitted program

    Returns:
        ``key = value`` lines

    """
    return key_value_text([
        ('problem', str(summary.path)),
        ('threshold_U', summary.threshold),
        ('blocks', str(summary.blocks)),
        ('scalars', str(summary.scalars)),
        ('constraints_assembled', str(summary.rows_assembled)),
        ('constraints_kept', str(summary.rows_kept)),
        ('reused', 'yes' if summary.reused else 'no'),
        ('seconds', f'{summary.seconds:.2f}'),
    ])


def format_solve_outcome(outcome: SolveOutcome) -> str:
    """Format the result of the solve command."""
    result = outcome.result
    lines = [('status', result.status), ('bound', f'{outcome.bound:.12g}')]
    if result.iterations is not None:
        lines.append(('iterations', str(result.iterations)))
    lines.append(('seconds', f'{outcome.run.seconds:.2f}'))
    return key_value_text(lines)


def format_verification(report: VerificationReport) -> str:
    """Format the result of the verify command."""
    return key_value_text(report.as_lines())


def format_run_report(report: RunReport) -> str:
    """Format the result of the run command."""
    return report.as_text()


def format_molien_table(rows: list[BlockSizeRow], full: bool = False) -> str:  # noqa: FBT001, FBT002
    """Format SOS block sizes as an aligned table.

    The left column group gives the monomial-basis block size of each
    generator family, the right group the largest block left after
    symmetry reduction.

    Args:
        rows: One row per SOS degree
        full: Append every isotypic block size of each family

    Returns:
        The table, one line per degree after a two-line header

    """
    titles = [COLUMN_TITLES[family] for family in TABLE_FAMILIES]
    width = max(8, *(len(title) + 2 for title in titles))
    header = f'{"delta":>5} |' + ''.join(f'{title:>{width}}' for title in titles)
    header += ' |' + ''.join(f'{title:>{width}}' for title in titles)
    lines = [f'{"":>5} |{"no symmetry":>{width * len(titles)}} |{"symmetry":>{width * len(titles)}}', header]
    for row in rows:
        line = f'{row.delta:>5} |' + ''.join(f'{row.plain[family]:>{width}}' for family in TABLE_FAMILIES)
        line += ' |' + ''.join(f'{row.largest[family]:>{width}}' for family in TABLE_FAMILIES)
        lines.append(line)
        if full:
            for family in TABLE_FAMILIES:
                sizes = row.isotypic.get(family, {})
                if sizes:
                    multiset = ', '.join(f'{name}:{size}' for name, size in sorted(sizes.items()))
                    lines.append(f'{"":>5}   {COLUMN_TITLES[family]}: {multiset}')
    return '\n'.join(lines)


def format_oracle(report: OracleReport) -> str:
    """Format the result of the oracle command."""
    lines = [
        ('points', str(report.n)),
        ('chosen', str(report.N)),
        ('level', str(report.t)),
        ('s', str(report.s)),
        ('seed', str(report.seed)),
        ('brute_force', f'{report.brute_force:.12g}'),
        ('minimizer', ' '.join(str(index) for index in report.minimizer)),
    ]
    if report.relaxation is not None:
        lines += [
            ('status', report.status or ''),
            ('relaxation', f'{report.relaxation:.12g}'),
            ('gap', f'{report.gap:.6e}'),
        ]
        expected = report.expected_sums
        lines += [
            (f'cardinality_{size}', f'{total:.10g} (expected {expected[size]})')
            for size, total in sorted(report.cardinality_sums.items())
        ]
    if report.problem_path is not None:
        lines.append(('problem', str(report.problem_path)))
    return key_value_text(lines)
