"""Run pipeline use case."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import yaml

from rieszbound.domain.entities import RunReport
from rieszbound.domain.sdpa import recover_assignment
from rieszbound.use_cases.generate_problem import GenerateProblemUseCase
from rieszbound.use_cases.solve_problem import SOLVER_LOG, SolveProblemUseCase
from rieszbound.use_cases.stages import stage
from rieszbound.use_cases.verify_bound import VerifyBoundUseCase

if TYPE_CHECKING:
    from rieszbound.domain.entities import Config
    from rieszbound.ports.filesystem import FileSystemPort
    from rieszbound.ports.solver import SolverPort
    from rieszbound.ports.workspace import WorkspacePort

logger = logging.getLogger(__name__)

REPORT_TEXT_FILE = 'report.txt'
REPORT_YAML_FILE = 'report.yaml'


class RunPipelineUseCase:
    """Use case for the whole generate, prune, emit, solve and verify pipeline.

    Every failure is re-raised as a ``StageError`` naming the stage it
    happened in. The report is written to the instance workspace both as
    key-value text and as YAML.
    """

    def __init__(self, filesystem: FileSystemPort, workspace: WorkspacePort, solver: SolverPort) -> None:
        """Initialize the use case.

        Args:
            filesystem: Filesystem port for workspace files
            workspace: Workspace port naming the instance directory
            solver: Solver port running the external solver

        """
        self.filesystem = filesystem
        self.workspace = workspace
        self.solver = solver

    async def execute(self, config: Config) -> RunReport:
        """Run every stage for one configuration.

        Args:
            config: Run configuration

        Returns:
            The run report; a failed verification is recorded, not raised

        Raises:
            StageError: If a stage fails

        """
        timings: dict[str, float] = {}
        generated = await GenerateProblemUseCase(self.filesystem, self.workspace).execute(config, timings)
        directory = generated.directory
        with stage('solve', timings):
            block_struct = generated.problem.block_struct
            outcome = await SolveProblemUseCase(self.filesystem, self.solver).execute(
                generated.summary.path,
                config.family,
                block_struct,
            )
        with stage('verify', timings):
            assignment = None
            if outcome.blocks is not None:
                assignment = recover_assignment(generated.problem, outcome.blocks)
            else:
                logger.warning('No solution matrices available; skipping the dual-feasibility check')
            verification = await VerifyBoundUseCase(self.filesystem).execute(config, outcome.bound, assignment)
        report = RunReport(
            config_hash=config.config_hash(),
            config=config.model_dump(mode='json'),
            problem=generated.summary,
            status=outcome.result.status,
            primal_objective=outcome.result.primal_objective,
            dual_objective=outcome.result.dual_objective,
            iterations=outcome.result.iterations,
            verification=verification,
            timings=timings,
            paths={
                'workspace': str(directory),
                'problem': str(generated.summary.path),
                'solver_log': str(directory / SOLVER_LOG),
                'report': str(directory / REPORT_TEXT_FILE),
            },
        )
        with stage('report', timings):
            await self.filesystem.write_file(directory / REPORT_TEXT_FILE, report.as_text())
            await self.filesystem.write_file(
                directory / REPORT_YAML_FILE,
                yaml.safe_dump(report.model_dump(mode='json'), sort_keys=False),
            )
        logger.info(
            'Run %s finished: bound %.12g, verdict %s',
            report.config_hash,
            verification.bound,
            'PASS' if verification.passed else 'FAIL',
        )
        return report
