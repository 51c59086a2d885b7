"""Finite oracle use case."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from rieszbound.domain.energy import potential_matrix
from rieszbound.domain.entities import OracleReport
from rieszbound.domain.finite import assemble_finite_Lt, brute_force_minimum
from rieszbound.domain.polycore import random_unit_vectors
from rieszbound.domain.sdpa import emit_sdpa_sparse, recover_assignment
from rieszbound.domain.sdpgen import prune_constraints
from rieszbound.use_cases.generate_problem import PROBLEM_FILE
from rieszbound.use_cases.solve_problem import SolveProblemUseCase
from rieszbound.use_cases.stages import stage

if TYPE_CHECKING:
    from rieszbound.domain.entities import Config
    from rieszbound.ports.filesystem import FileSystemPort
    from rieszbound.ports.solver import SolverPort
    from rieszbound.ports.workspace import WorkspacePort

logger = logging.getLogger(__name__)


class FiniteOracleUseCase:
    """Use case for the finite-container relaxation on random sphere points.

    Draws ``n`` points, solves the level-t moment relaxation for choosing
    ``N`` of them and compares the value with exhaustive enumeration.
    Without a solver only the brute-force side and the emitted file are
    produced.
    """

    def __init__(self, filesystem: FileSystemPort, workspace: WorkspacePort, solver: SolverPort | None = None) -> None:
        """Initialize the use case.

        Args:
            filesystem: Filesystem port for the problem file
            workspace: Workspace port naming the oracle directory
            solver: Solver port; None skips solving

        """
        self.filesystem = filesystem
        self.workspace = workspace
        self.solver = solver

    async def execute(
        self,
        config: Config,
        n: int,
        N: int,
        t: int,
        adjacency_threshold: float | None = None,
    ) -> OracleReport:
        """Build, emit and optionally solve one finite relaxation.

        Args:
            config: Supplies s, seed, precision, digits, solver family and workdir
            n: Container size
            N: Points to choose
            t: Relaxation level
            adjacency_threshold: Pairs at inner product at least this are never chosen together

        Returns:
            The oracle report

        Raises:
            StageError: Labelled with generate, emit or solve

        """
        bits = config.precision_bits
        with stage('generate'):
            points = random_unit_vectors(np.random.default_rng(config.seed), n, bits)
            potentials = potential_matrix(points, config.s, bits)
            program = assemble_finite_Lt(points, potentials, N, t, adjacency_threshold)
            problem = prune_constraints(program.to_problem(bits))
            brute, minimizer = brute_force_minimum(potentials, N)
        title = f'oracle s{config.s} n{n} N{N} t{t} seed{config.seed}'
        digest = f'{config.config_hash()[:4]}{n:02x}{N:01x}{t:01x}'
        directory = config.workdir / self.workspace.instance_id(title, digest)
        path = directory / PROBLEM_FILE
        with stage('emit'):
            await self.filesystem.write_file(path, emit_sdpa_sparse(problem, config.digits))
        report = OracleReport(
            n=n,
            N=N,
            t=t,
            s=config.s,
            seed=config.seed,
            brute_force=float(brute),
            minimizer=minimizer,
            problem_path=path,
        )
        if self.solver is None:
            return report
        with stage('solve'):
            outcome = await SolveProblemUseCase(self.filesystem, self.solver).execute(path, config.family, problem.block_struct)
        sums: dict[int, float] = {}
        if outcome.blocks is not None:
            moments = program.moments(recover_assignment(problem, outcome.blocks))
            sums = program.cardinality_sums(moments)
        relaxation = -outcome.bound
        logger.info('L_%d = %.10g, brute force %.10g', t, relaxation, brute)
        return report.model_copy(update={'relaxation': relaxation, 'status': outcome.result.status, 'cardinality_sums': sums})
