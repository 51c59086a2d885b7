"""Domain-specific exceptions for rieszbound."""

from __future__ import annotations


class RieszBoundError(Exception):
    """Base exception for all rieszbound errors."""


class PrecisionMismatchError(RieszBoundError):
    """Raised when values of different working precisions meet in one operation."""

    def __init__(self, left: int, right: int) -> None:
        """Initialize exception with both precisions.

        Args:
            left: Precision in bits of the left operand
            right: Precision in bits of the right operand

        """
        super().__init__(f'Cannot combine values at {left} and {right} bits of precision')
        self.left = left
        self.right = right


class VariableCountError(RieszBoundError):
    """Raised when polynomials or points disagree on the number of variables."""


class NotRealError(RieszBoundError):
    """Raised when a complex polynomial is cast to real but has imaginary parts.

    At the zonal-matrix stage this signals a phase-convention bug in the
    spherical harmonics or the Clebsch-Gordan coupling.
    """


class IndexAdmissibilityError(RieszBoundError):
    """Raised when a tau index does not belong to the index set of an irrep label."""


class CouplingRangeError(RieszBoundError):
    """Raised when a coupled degree lies outside [|l1 - l2|, l1 + l2]."""


class SubsetSizeError(RieszBoundError):
    """Raised when a subset is larger than the hierarchy level supports."""


class RewriteVerificationError(RieszBoundError):
    """Raised when an inner-product rewrite fails its sampled identity check.

    Either the input polynomial is not O(3)-invariant or the degree bound
    is too small to express it.
    """

    def __init__(self, residual: float, tolerance: float) -> None:
        """Initialize exception with the observed residual.

        Args:
            residual: Largest sampled residual
            tolerance: Allowed residual

        """
        super().__init__(f'Inner-product rewrite residual {residual:.3e} exceeds tolerance {tolerance:.3e}')
        self.residual = residual
        self.tolerance = tolerance


class NotPositiveDefiniteError(RieszBoundError):
    """Raised when a Cholesky pivot is not positive at working precision."""


class GroupError(RieszBoundError):
    """Raised when a permutation group or its irreps are inconsistent or unsupported."""


class MolienConsistencyError(RieszBoundError):
    """Raised when Molien multiplicities are not integers or disagree with projections."""


class DegreeError(RieszBoundError):
    """Raised when a degree bound cannot carry the polynomial it must represent."""


class InconsistentConstraintError(RieszBoundError):
    """Raised when two constraint rows share a left side but not a right side."""


class SdpaFormatError(RieszBoundError):
    """Raised when an SDPA-sparse file cannot be written or parsed."""


class ThresholdError(RieszBoundError):
    """Raised when a derived inner-product threshold falls outside (-1, 1)."""


class ConfigError(RieszBoundError):
    """Raised when configuration values are missing, unknown or invalid."""


class SolverError(RieszBoundError):
    """Base exception for external solver failures."""


class SolverNotFoundError(SolverError):
    """Raised when the solver executable is not on PATH."""


class SolverNonconvergenceError(SolverError):
    """Raised when the solver terminates without a usable solution."""

    def __init__(self, status: str, detail: str = '') -> None:
        """Initialize exception with the solver status token.

        Args:
            status: Normalized termination status
            detail: Optional extra context from the solver log

        """
        suffix = f': {detail}' if detail else ''
        super().__init__(f'Solver did not converge (status {status}){suffix}')
        self.status = status


class SolverOutputParseError(SolverError):
    """Raised when solver output lacks the expected labeled objective lines."""


class IndependentSetSamplingError(RieszBoundError):
    """Raised when rejection sampling cannot find an independent set of a cardinality."""


class VerificationFailedError(RieszBoundError):
    """Raised when a solved bound exceeds a reference energy beyond tolerance."""


class StageError(RieszBoundError):
    """Raised by the pipeline to label a failure with the stage it happened in."""

    def __init__(self, stage: str, cause: Exception) -> None:
        """Initialize exception with the failing stage.

        Args:
            stage: Pipeline stage name (generate, prune, emit, solve, verify)
            cause: Underlying exception

        """
        super().__init__(f'{stage} stage failed: {cause}')
        self.stage = stage
        self.cause = cause
