"""Verify bound use case."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import yaml

from rieszbound.domain.energy import energy_bipyramid, optimize_square_pyramid
from rieszbound.domain.entities import REFERENCE_POINT_COUNT, TOLERANCE_FACTOR, ReferenceEnergies, VerificationReport
from rieszbound.domain.exceptions import SolverOutputParseError
from rieszbound.domain.feasibility import sample_dual_feasibility
from rieszbound.domain.sdpa import SolverResult
from rieszbound.domain.subsetspace import zonal_blocks
from rieszbound.use_cases.solve_problem import RESULT_FILE

if TYPE_CHECKING:
    from collections.abc import Mapping
    from pathlib import Path

    from rieszbound.domain.entities import Config
    from rieszbound.domain.sosmodel import VarKey
    from rieszbound.ports.filesystem import FileSystemPort

logger = logging.getLogger(__name__)


def reference_energies(s: int, precision_bits: int) -> ReferenceEnergies:
    """Bipyramid energy and the optimized square pyramid for N = 5."""
    z, square = optimize_square_pyramid(s, precision_bits)
    return ReferenceEnergies(
        bipyramid=float(energy_bipyramid(s, precision_bits)),
        square_pyramid=float(square),
        square_pyramid_height=float(z),
    )


class VerifyBoundUseCase:
    """Use case for checking a solved bound against explicit configurations.

    A lower bound can never exceed the energy of a configuration; beyond the
    solver tolerance that signals a defect in the generated program. When
    solved kernel values are supplied, the dual constraints are also sampled
    on random independent sets.
    """

    def __init__(self, filesystem: FileSystemPort) -> None:
        """Initialize the use case.

        Args:
            filesystem: Filesystem port for reading a stored solver result

        """
        self.filesystem = filesystem

    async def stored_bound(self, directory: Path) -> float:
        """Bound recorded by an earlier solve in a workspace directory.

        Raises:
            SolverOutputParseError: If no solver result is stored there

        """
        path = directory / RESULT_FILE
        if not await self.filesystem.file_exists(path):
            msg = f'No solver result at {path}; run solve first or pass a bound'
            raise SolverOutputParseError(msg)
        return SolverResult.model_validate(yaml.safe_load(await self.filesystem.read_file(path))).bound

    async def execute(
        self,
        config: Config,
        bound: float,
        assignment: Mapping[VarKey, float] | None = None,
    ) -> VerificationReport:
        """Compare ``bound`` with the reference energies.

        Args:
            config: Run configuration (s, d, precision, tolerance, samples, seed)
            bound: Solved objective of the maximization program
            assignment: Recovered program variables, enabling the dual-feasibility check

        Returns:
            The verification report; ``passed`` is False on a violation

        Raises:
            IndependentSetSamplingError: If sampling finds no independent set for U

        """
        tolerance = TOLERANCE_FACTOR * config.solver_tolerance
        references = None
        reference = config.upper_bound if config.upper_bound is not None else math.inf
        if config.n_particles == REFERENCE_POINT_COUNT:
            references = reference_energies(config.s, config.precision_bits)
            reference = min(reference, references.best)
        max_violation = None
        if assignment is not None and config.samples > 0:
            feasibility = sample_dual_feasibility(
                zonal_blocks(config.d, precision_bits=config.precision_bits),
                assignment,
                config.s,
                config.resolve_threshold(),
                config.samples,
                seed=config.seed,
                precision_bits=config.precision_bits,
            )
            max_violation = feasibility.max_violation
        report = VerificationReport(
            bound=bound,
            reference=reference,
            references=references,
            tolerance=tolerance,
            max_violation=max_violation,
        )
        if report.passed:
            logger.info('Bound %.12g is below the reference energy by %.3e', bound, report.gap)
        else:
            logger.warning(
                'Verification failed: bound %.12g, reference %.12g, max violation %s',
                bound,
                reference,
                max_violation,
            )
        return report
