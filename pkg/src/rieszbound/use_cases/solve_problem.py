"""Solve problem use case."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import yaml
from pydantic import BaseModel, ConfigDict

from rieszbound.domain.entities import SolverRun
from rieszbound.domain.exceptions import SolverOutputParseError
from rieszbound.domain.sdpa import (
    SolverResult,
    parse_csdp_output,
    parse_csdp_solution,
    parse_sdpa_output,
    parse_sdpa_solution,
)

if TYPE_CHECKING:
    from pathlib import Path

    from rieszbound.domain.sdpa import BlockValues, SolverFamily
    from rieszbound.ports.filesystem import FileSystemPort
    from rieszbound.ports.solver import SolverPort

logger = logging.getLogger(__name__)

SOLVER_LOG = 'solver.log'
RESULT_FILE = 'result.yaml'
SOLUTION_FILES: dict[str, str] = {'csdp': 'solution.txt', 'sdpa': 'result.out'}


class SolveOutcome(BaseModel):
    """Parsed solver report, the raw run, and the solved blocks when available."""

    model_config = ConfigDict(frozen=True)

    result: SolverResult
    run: SolverRun
    blocks: dict[int, dict[tuple[int, int], float]] | None = None

    @property
    def bound(self) -> float:
        """Objective of the maximization program."""
        return self.result.bound


def _log_text(run: SolverRun) -> str:
    parts = [f'$ {" ".join(run.command)}', f'# exit code {run.returncode} after {run.seconds:.2f}s', run.stdout]
    if run.stderr:
        parts += ['# stderr', run.stderr]
    return '\n'.join(parts).rstrip('\n') + '\n'


class SolveProblemUseCase:
    """Use case for running the external solver on an emitted problem."""

    def __init__(self, filesystem: FileSystemPort, solver: SolverPort) -> None:
        """Initialize the use case.

        Args:
            filesystem: Filesystem port for logs and solution files
            solver: Solver port that runs the external process

        """
        self.filesystem = filesystem
        self.solver = solver

    async def _read_solution(
        self,
        family: SolverFamily,
        path: Path,
        text: str | None,
        block_struct: list[int] | None,
    ) -> BlockValues | None:
        if family == 'csdp':
            if not await self.filesystem.file_exists(path):
                return None
            text = await self.filesystem.read_file(path)
            return parse_csdp_solution(text) or None
        if block_struct is None or text is None:
            return None
        return parse_sdpa_solution(text, block_struct)

    async def execute(
        self,
        problem_path: Path,
        family: SolverFamily,
        block_struct: list[int] | None = None,
    ) -> SolveOutcome:
        """Solve one SDPA-sparse file and read back the result.

        Args:
            problem_path: Emitted problem file
            family: Output dialect of the solver
            block_struct: Signed block sizes, needed to read SDPA's solution matrices

        Returns:
            The parsed outcome; the solver log and the parsed result are written next to the problem

        Raises:
            SolverNotFoundError: If the solver is not installed
            SolverNonconvergenceError: If the status is not optimal or near optimal
            SolverOutputParseError: If the report lacks objective values

        """
        directory = problem_path.parent
        output_path = directory / SOLUTION_FILES[family]
        run = await self.solver.solve(problem_path, output_path)
        await self.filesystem.write_file(directory / SOLVER_LOG, _log_text(run))
        report_text = None
        if family == 'csdp':
            result = parse_csdp_output(run.stdout, run.returncode)
        else:
            if not await self.filesystem.file_exists(output_path):
                msg = f'SDPA wrote no result file at {output_path}'
                raise SolverOutputParseError(msg)
            report_text = await self.filesystem.read_file(output_path)
            result = parse_sdpa_output(report_text)
        logger.info(
            'Solver status %s: primal %s, dual %s after %s iterations',
            result.status,
            result.primal_objective,
            result.dual_objective,
            result.iterations,
        )
        await self.filesystem.write_file(directory / RESULT_FILE, yaml.safe_dump(result.model_dump(mode='json'), sort_keys=False))
        result.require_converged()
        try:
            blocks = await self._read_solution(family, output_path, report_text, block_struct)
        except SolverOutputParseError:
            logger.warning('Could not read the solution matrices from %s', output_path)
            blocks = None
        return SolveOutcome(result=result, run=run, blocks=blocks)
