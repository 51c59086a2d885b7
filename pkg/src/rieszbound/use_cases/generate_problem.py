"""Generate problem use case."""

from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import TYPE_CHECKING

from pydantic import BaseModel, ConfigDict

from rieszbound.domain.entities import ProblemSummary
from rieszbound.domain.polycore import scalar_context
from rieszbound.domain.sdpa import emit_sdpa_sparse
from rieszbound.domain.sdpgen import SdpProblem, assemble_E2, prune_constraints
from rieszbound.use_cases.stages import stage

if TYPE_CHECKING:
    from rieszbound.domain.entities import Config
    from rieszbound.ports.filesystem import FileSystemPort
    from rieszbound.ports.workspace import WorkspacePort

logger = logging.getLogger(__name__)

PROBLEM_FILE = 'problem.dat-s'
CONFIG_FILE = 'config.txt'


def instance_directory(config: Config, workspace: WorkspacePort) -> Path:
    """Workspace directory of the instance a configuration describes."""
    return config.workdir / workspace.instance_id(config.instance_title(), config.config_hash())


class GeneratedProblem(BaseModel):
    """A pruned program together with where it was written."""

    model_config = ConfigDict(frozen=True)

    problem: SdpProblem
    directory: Path
    summary: ProblemSummary


class GenerateProblemUseCase:
    """Use case for assembling, pruning and emitting one program.

    Files are only rewritten when their content changes, so rerunning with
    the same configuration leaves the workspace byte-identical.
    """

    def __init__(self, filesystem: FileSystemPort, workspace: WorkspacePort) -> None:
        """Initialize the use case.

        Args:
            filesystem: Filesystem port for writing the problem file
            workspace: Workspace port for naming the instance directory

        """
        self.filesystem = filesystem
        self.workspace = workspace

    async def _write_if_changed(self, path: Path, content: str) -> bool:
        """Write ``content`` unless the file already holds it; True when reused."""
        if await self.filesystem.file_exists(path) and await self.filesystem.read_file(path) == content:
            logger.info('Reusing identical %s', path)
            return True
        await self.filesystem.write_file(path, content)
        return False

    async def execute(self, config: Config, timings: dict[str, float] | None = None) -> GeneratedProblem:
        """Assemble E*_2 for the configuration, prune it and write it as SDPA-sparse.

        Args:
            config: Run configuration
            timings: Optional mapping receiving seconds per stage

        Returns:
            The pruned program, its directory and a summary

        Raises:
            StageError: Labelled with generate, prune or emit

        """
        started = time.perf_counter()
        directory = instance_directory(config, self.workspace)
        with stage('generate', timings):
            U = config.resolve_threshold()
            assembled = assemble_E2(
                config.n_particles,
                config.s,
                config.d,
                config.delta,
                U,
                symmetry=config.symmetry,
                M_bound=config.m_bound,
                pair_form=config.pair_form,
                precision_bits=config.precision_bits,
                epsilon_shift=config.epsilon_shift,
            )
        with stage('prune', timings):
            problem = prune_constraints(assembled)
        with stage('emit', timings):
            await self.filesystem.create_directory(directory)
            await self._write_if_changed(directory / CONFIG_FILE, config.as_config_text())
            path = directory / PROBLEM_FILE
            reused = await self._write_if_changed(path, emit_sdpa_sparse(problem, config.digits))
        summary = ProblemSummary(
            path=path,
            threshold=scalar_context(config.precision_bits).nstr(U, 30),
            blocks=len(problem.block_layout()),
            scalars=len(problem.scalars),
            rows_assembled=len(assembled.rows),
            rows_kept=len(problem.rows),
            reused=reused,
            seconds=time.perf_counter() - started,
        )
        logger.info('Problem for %s ready at %s (%d constraints)', config.instance_title(), path, summary.rows_kept)
        return GeneratedProblem(problem=problem, directory=directory, summary=summary)
