"""Sampled check of the dual constraints a_i + A_2 K(S) <= f(S) on independent sets.

The kernel is evaluated directly in cartesian coordinates from the zonal
blocks, independently of the inner-product rewrite used during assembly.
"""

from __future__ import annotations

import logging
import time
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from rieszbound.domain.energy import riesz_potential
from rieszbound.domain.invariants import sample_independent_sets
from rieszbound.domain.polycore import DEFAULT_PRECISION_BITS, SparsePoly, scalar_context
from rieszbound.domain.sdpgen import MAX_LEVEL
from rieszbound.domain.sosmodel import VarKey
from rieszbound.domain.subsetspace import apply_A2

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from rieszbound.domain.subsetspace import ZonalBlockSet

logger = logging.getLogger(__name__)


class FeasibilityReport(BaseModel):
    """Largest sampled violation of a_i + A_2 K(S) - f(S), overall and per cardinality."""

    model_config = ConfigDict(frozen=True)

    max_violation: float
    by_cardinality: dict[int, float] = Field(default_factory=dict)
    samples: int = Field(..., ge=0, description='Independent sets evaluated')

    def passes(self, tolerance: float) -> bool:
        """Whether every sampled violation is within ``tolerance``."""
        return self.max_violation <= tolerance


def kernel_polynomials(
    blocks: Sequence[ZonalBlockSet],
    assignment: Mapping[VarKey, float],
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> dict[int, SparsePoly]:
    """A_2 K on sets of 0..4 points as polynomials in 3i coordinates, for K = sum of <F, Z>."""
    ctx = scalar_context(precision_bits)
    result = {}
    for size in range(MAX_LEVEL + 1):
        total = SparsePoly.zero(3 * size, precision_bits)
        for block in blocks:
            for (a, b) in block.entries:
                weight = assignment.get(VarKey(f'F{block.label.name}', min(a, b), max(a, b)))
                if weight:
                    total += apply_A2(block.kernel(a, b), size, precision_bits).scale(ctx.mpf(weight))
        result[size] = total
    return result


def free_values(assignment: Mapping[VarKey, float]) -> list[float]:
    """a_i = a_i+ - a_i- for i = 0..4."""
    return [
        assignment.get(VarKey(f'a{level}+'), 0.0) - assignment.get(VarKey(f'a{level}-'), 0.0)
        for level in range(MAX_LEVEL + 1)
    ]


def sample_dual_feasibility(
    blocks: Sequence[ZonalBlockSet],
    assignment: Mapping[VarKey, float],
    s: int,
    U: object,
    n_samples: int,
    seed: int = 0,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> FeasibilityReport:
    """Evaluate the dual constraints on random independent sets of every cardinality.

    Args:
        blocks: Zonal blocks the kernel is built from
        assignment: Solved values of the F blocks and the split a_i
        s: Riesz exponent
        U: Inner-product threshold of the packing graph
        n_samples: Sets sampled per cardinality (one suffices for the empty set)
        seed: Seed of the sampler
        precision_bits: Working precision

    Raises:
        IndependentSetSamplingError: If some cardinality has no independent set under U

    """
    started = time.perf_counter()
    ctx = scalar_context(precision_bits)
    rng = np.random.default_rng(seed)
    kernels = kernel_polynomials(blocks, assignment, precision_bits)
    a = free_values(assignment)
    exponent = ctx.mpf(s)
    by_cardinality = {}
    total = 0
    for size in range(MAX_LEVEL + 1):
        count = 1 if size == 0 else n_samples
        worst = -ctx.inf
        for points in sample_independent_sets(size, U, count, rng, precision_bits):
            value = a[size] + kernels[size].evaluate([c for point in points for c in point]).real
            if size == 2:  # noqa: PLR2004
                value -= riesz_potential(points[0], points[1], exponent)
            worst = max(worst, value)
        by_cardinality[size] = float(worst)
        total += count
    report = FeasibilityReport(max_violation=max(by_cardinality.values()), by_cardinality=by_cardinality, samples=total)
    logger.info(
        'Dual feasibility over %d sets: max violation %.3e in %.2fs',
        total,
        report.max_violation,
        time.perf_counter() - started,
    )
    return report
