"""Moment relaxations of energy minimization over a finite container, and the brute-force oracle.

For a container V of n points, N of which must be chosen, the level-t
relaxation minimizes sum over pairs of f({i, j}) y_{ij} over moment vectors y
indexed by independent subsets of size at most 2t, subject to y_empty = 1,
the moment matrix M_t(y)_{J, J'} = y_{J u J'} being PSD, y >= 0, and
N y_S = sum over j of y_{S u {j}} for every |S| < 2t. The relaxation is laid
out in the same block form as the main program: one PSD block holds M_t(y),
a diagonal block holds y, and rows tie the two together.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import TYPE_CHECKING, Any

from pydantic import BaseModel, ConfigDict, Field

from rieszbound.domain.exceptions import SubsetSizeError
from rieszbound.domain.polycore import DEFAULT_PRECISION_BITS, dot, scalar_context
from rieszbound.domain.sdpgen import ConstraintRow, SdpBlock, SdpProblem
from rieszbound.domain.sosmodel import VarKey

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from rieszbound.domain.energy import Point
    from rieszbound.domain.polycore import Scalar

logger = logging.getLogger(__name__)

MAX_CONTAINER_SIZE = 12
MAX_PARTICLES = 6
MOMENT_BLOCK = 'moments'

Subset = tuple[int, ...]


def subset_name(subset: Subset) -> str:
    """Scalar name of the moment y_S."""
    return 'y:' + ','.join(map(str, subset))


class FiniteMomentProgram(BaseModel):
    """Level-t moment relaxation for choosing N of n container points."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1, le=MAX_CONTAINER_SIZE, description='Container size')
    N: int = Field(..., ge=1, le=MAX_PARTICLES, description='Number of points chosen')
    t: int = Field(..., ge=1, description='Relaxation level')
    potentials: list[list[Any]] = Field(..., description='Pairwise potentials f({i, j})')
    subsets: list[Subset] = Field(..., description='Independent subsets of size at most 2t')
    moment_index: list[Subset] = Field(..., description='Independent subsets of size at most t')

    def cardinality_constraints(self) -> list[tuple[Subset, list[Subset]]]:
        """(S, extensions): N y_S = |S| y_S + sum of y over independent S u {j}, j not in S."""
        known = set(self.subsets)
        result = []
        for subset in self.subsets:
            if len(subset) >= 2 * self.t:
                continue
            extensions = [
                extended
                for j in range(self.n)
                if j not in subset and (extended := tuple(sorted((*subset, j)))) in known
            ]
            result.append((subset, extensions))
        return result

    def to_problem(self, precision_bits: int = DEFAULT_PRECISION_BITS) -> SdpProblem:
        """Block form: maximize -sum f y over the moment block and the diagonal of moments."""
        ctx = scalar_context(precision_bits)
        known = set(self.subsets)
        scalars = [subset_name(subset) for subset in self.subsets]
        rows = [ConstraintRow(label='normalization', coefficients={VarKey(subset_name(())): ctx.one}, rhs=ctx.one)]
        for a, b in itertools.combinations_with_replacement(range(len(self.moment_index)), 2):
            union = tuple(sorted(set(self.moment_index[a]) | set(self.moment_index[b])))
            coefficients = {VarKey(MOMENT_BLOCK, a, b): ctx.one}
            if union in known:
                coefficients[VarKey(subset_name(union))] = -ctx.one
            rows.append(ConstraintRow(label=f'moment:{a},{b}', coefficients=coefficients, rhs=ctx.zero))
        for subset, extensions in self.cardinality_constraints():
            coefficients = {VarKey(subset_name(extended)): ctx.one for extended in extensions}
            coefficients[VarKey(subset_name(subset))] = ctx.mpf(len(subset) - self.N)
            rows.append(ConstraintRow(label=f'cardinality:{subset_name(subset)}', coefficients=coefficients, rhs=ctx.zero))
        objective = {
            VarKey(subset_name(subset)): -ctx.convert(self.potentials[subset[0]][subset[1]])
            for subset in self.subsets
            if len(subset) == 2  # noqa: PLR2004
        }
        return SdpProblem(
            blocks=[SdpBlock(name=MOMENT_BLOCK, size=len(self.moment_index))],
            scalars=scalars,
            objective={key: value for key, value in objective.items() if value},
            rows=rows,
            precision_bits=precision_bits,
            metadata={'n': self.n, 'N': self.N, 't': self.t},
        )

    def moments(self, assignment: Mapping[VarKey, float]) -> dict[Subset, float]:
        """Recovered y_S from a solved assignment."""
        return {subset: float(assignment.get(VarKey(subset_name(subset)), 0.0)) for subset in self.subsets}

    def cardinality_sums(self, moments: Mapping[Subset, float]) -> dict[int, float]:
        """Sum of y_S over |S| = i, for each i; equals C(N, i) for every feasible y."""
        sums: dict[int, float] = {}
        for subset, value in moments.items():
            sums[len(subset)] = sums.get(len(subset), 0.0) + value
        return dict(sorted(sums.items()))

    def energy_of(self, moments: Mapping[Subset, float]) -> float:
        """Relaxation objective sum f({i, j}) y_{ij}."""
        return sum(float(self.potentials[s[0]][s[1]]) * value for s, value in moments.items() if len(s) == 2)  # noqa: PLR2004


def _is_independent(subset: Subset, inner: Sequence[Sequence[Scalar]] | None, threshold: object) -> bool:
    if inner is None:
        return True
    return all(inner[k][kp] < threshold for k, kp in itertools.combinations(subset, 2))


def assemble_finite_Lt(
    points: Sequence[Point],
    potentials: Sequence[Sequence[Scalar]],
    N: int,
    t: int,
    adjacency_threshold: object | None = None,
) -> FiniteMomentProgram:
    """Build the level-t relaxation over a finite container.

    Args:
        points: Container points on the sphere
        potentials: Pairwise potentials, an n x n matrix
        N: Number of points to choose
        t: Relaxation level
        adjacency_threshold: Pairs with inner product at least this are adjacent and never chosen together

    Raises:
        SubsetSizeError: If the container, N or t exceed the supported sizes

    """
    n = len(points)
    if n > MAX_CONTAINER_SIZE or not 1 <= t <= N <= MAX_PARTICLES or N > n:
        msg = f'Finite relaxations need n <= {MAX_CONTAINER_SIZE} and t <= N <= min(n, {MAX_PARTICLES}); got n={n}, N={N}, t={t}'
        raise SubsetSizeError(msg)
    inner = None
    if adjacency_threshold is not None:
        inner = [[dot(x, y) for y in points] for x in points]
    subsets = [
        subset
        for size in range(min(2 * t, n) + 1)
        for subset in itertools.combinations(range(n), size)
        if _is_independent(subset, inner, adjacency_threshold)
    ]
    moment_index = [subset for subset in subsets if len(subset) <= t]
    logger.info('Finite relaxation n=%d N=%d t=%d: %d moments, moment matrix %d', n, N, t, len(subsets), len(moment_index))
    return FiniteMomentProgram(
        n=n,
        N=N,
        t=t,
        potentials=[list(row) for row in potentials],
        subsets=subsets,
        moment_index=moment_index,
    )


def brute_force_minimum(potentials: Sequence[Sequence[Scalar]], N: int) -> tuple[Scalar, Subset]:
    """Smallest total potential over all N-subsets, with a minimizing subset.

    Raises:
        SubsetSizeError: If N exceeds the number of points

    """
    n = len(potentials)
    if not 0 <= N <= n:
        msg = f'Cannot choose {N} of {n} points'
        raise SubsetSizeError(msg)
    candidates = (
        (sum((potentials[k][kp] for k, kp in itertools.combinations(subset, 2)), start=0), subset)
        for subset in itertools.combinations(range(n), N)
    )
    best = min(candidates, key=lambda candidate: candidate[0])
    logger.debug('Brute force over C(%d, %d) = %d subsets', n, N, math.comb(n, N))
    return best
