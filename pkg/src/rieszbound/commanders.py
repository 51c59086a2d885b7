"""Commander interface for rieszbound."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

from rieszbound.adapters.config_file import KeyValueConfigAdapter
from rieszbound.adapters.filesystem import FileSystemAdapter
from rieszbound.adapters.solver import ExternalSolverAdapter
from rieszbound.adapters.workspace import WorkspaceNamingAdapter
from rieszbound.use_cases.finite_oracle import FiniteOracleUseCase
from rieszbound.use_cases.generate_problem import GenerateProblemUseCase, instance_directory
from rieszbound.use_cases.load_config import LoadConfigUseCase
from rieszbound.use_cases.molien_table import MolienTableUseCase
from rieszbound.use_cases.run_pipeline import RunPipelineUseCase
from rieszbound.use_cases.solve_problem import SolveProblemUseCase
from rieszbound.use_cases.stages import stage
from rieszbound.use_cases.verify_bound import VerifyBoundUseCase

if TYPE_CHECKING:
    from collections.abc import Mapping
    from pathlib import Path

    from rieszbound.domain.entities import Config, OracleReport, RunReport, VerificationReport
    from rieszbound.use_cases.generate_problem import GeneratedProblem
    from rieszbound.use_cases.molien_table import BlockSizeRow
    from rieszbound.use_cases.solve_problem import SolveOutcome


class RieszBoundCommander:
    """A commander for the rbound CLI.

    Holds the validated configuration and wires adapters into use cases.
    """

    def __init__(self, config: Config) -> None:
        self.config = config

    @classmethod
    async def from_sources(cls, config_path: Path | None, overrides: Mapping[str, Any]) -> RieszBoundCommander:
        """Build a commander from an optional configuration file and command-line overrides.

        Raises:
            ConfigError: If the configuration is invalid

        """
        config = await LoadConfigUseCase(KeyValueConfigAdapter()).execute(config_path, overrides)
        return cls(config)

    @property
    def directory(self) -> Path:
        """Workspace directory of the configured instance."""
        return instance_directory(self.config, WorkspaceNamingAdapter())

    async def generate(self) -> GeneratedProblem:
        """Assemble, prune and emit the configured program."""
        use_case = GenerateProblemUseCase(FileSystemAdapter(), WorkspaceNamingAdapter())
        return await use_case.execute(self.config)

    async def solve(self) -> SolveOutcome:
        """Generate the program if needed, then run the external solver on it."""
        generated = await self.generate()
        use_case = SolveProblemUseCase(FileSystemAdapter(), ExternalSolverAdapter(self.config.solver_cmd))
        with stage('solve'):
            return await use_case.execute(generated.summary.path, self.config.family, generated.problem.block_struct)

    async def verify(self, bound: float | None = None) -> VerificationReport:
        """Compare a bound, or the one stored by the last solve, with the reference energies."""
        use_case = VerifyBoundUseCase(FileSystemAdapter())
        with stage('verify'):
            if bound is None:
                bound = await use_case.stored_bound(self.directory)
            return await use_case.execute(self.config, bound)

    async def run(self) -> RunReport:
        """Run the full pipeline."""
        use_case = RunPipelineUseCase(
            FileSystemAdapter(),
            WorkspaceNamingAdapter(),
            ExternalSolverAdapter(self.config.solver_cmd),
        )
        return await use_case.execute(self.config)

    async def molien(self, i: int, delta_min: int, delta_max: int) -> list[BlockSizeRow]:
        """Tabulate SOS block sizes for the i-point constraint."""
        return await MolienTableUseCase().execute(i, delta_min, delta_max, self.config.precision_bits)

    async def oracle(
        self,
        n: int,
        N: int,
        t: int,
        adjacency_threshold: float | None = None,
        *,
        solve: bool = True,
    ) -> OracleReport:
        """Run the finite-container oracle on random points."""
        solver = ExternalSolverAdapter(self.config.solver_cmd) if solve else None
        use_case = FiniteOracleUseCase(FileSystemAdapter(), WorkspaceNamingAdapter(), solver)
        return await use_case.execute(self.config, n, N, t, adjacency_threshold)
