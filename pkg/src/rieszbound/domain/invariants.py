"""Rewriting O(3)-invariant polynomials in pairwise inner products.

A polynomial in the cartesian coordinates of i points on the sphere that is
invariant under simultaneous rotation and reflection is a polynomial in the
inner products x_k . x_k'. The coefficients are recovered by regularized least
squares: every monomial in the C(i+1, 2) inner products (norms included) is
expanded in cartesian coordinates, and the expansions become the columns of a
sparse linear system. Systems split by per-point degree, and the normal
equations of each block are factorized once and reused for every right-hand
side. Setting the norms to 1 afterwards leaves q in the C(i, 2) edge variables
u_e, edges ordered lexicographically.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
import time
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from rieszbound.domain.exceptions import (
    DegreeError,
    IndependentSetSamplingError,
    NotPositiveDefiniteError,
    RewriteVerificationError,
    VariableCountError,
)
from rieszbound.domain.groups import PermGroup, act_on_poly
from rieszbound.domain.polycore import (
    DEFAULT_PRECISION_BITS,
    SparsePoly,
    check_tolerance,
    dot,
    random_unit_vectors,
    scalar_context,
    sphere_inner_product,
)
from rieszbound.domain.subsetspace import MAX_SUBSET_SIZE, apply_A2, subset_pairs

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from rieszbound.domain.polycore import Exponents, Scalar
    from rieszbound.domain.subsetspace import ZonalBlockSet

logger = logging.getLogger(__name__)

VERIFICATION_SAMPLES = 50
VERIFICATION_SEED = 20240917
REFINEMENT_STEPS = 2
SAMPLING_BATCH = 256


@functools.cache
def edges(i: int) -> tuple[tuple[int, int], ...]:
    """Edges {k, k'} of the complete graph on i vertices in lexicographic order."""
    return tuple(itertools.combinations(range(i), 2))


def edge_count(i: int) -> int:
    """Number of inner-product variables C(i, 2)."""
    return math.comb(i, 2)


def inner_products(points: Sequence[Sequence[Scalar]]) -> list[Scalar]:
    """Values of the edge variables u_e at a tuple of points."""
    return [dot(points[k], points[kp]) for k, kp in edges(len(points))]


def sample_independent_sets(
    i: int,
    U: object,
    count: int,
    rng: np.random.Generator,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    max_batches: int = 200,
) -> list[list[tuple[Scalar, Scalar, Scalar]]]:
    """Random i-tuples of unit vectors whose pairwise inner products are all at most U.

    Raises:
        IndependentSetSamplingError: If rejection sampling finds fewer than ``count`` tuples

    """
    if i <= 1:
        return [random_unit_vectors(rng, i, precision_bits) for _ in range(count)]
    found: list[list[tuple[Scalar, Scalar, Scalar]]] = []
    for _ in range(max_batches):
        points = random_unit_vectors(rng, SAMPLING_BATCH * i, precision_bits)
        for start in range(0, len(points), i):
            candidate = points[start : start + i]
            if all(value <= U for value in inner_products(candidate)):
                found.append(candidate)
                if len(found) == count:
                    return found
    msg = f'Found only {len(found)} of {count} independent {i}-sets with threshold U={U}'
    raise IndependentSetSamplingError(msg)


class InnerProductPoly(BaseModel):
    """A polynomial q in the edge variables of i points."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    i: int = Field(..., ge=2, le=MAX_SUBSET_SIZE, description='Number of points')
    poly: SparsePoly = Field(..., description='Polynomial in C(i, 2) edge variables')

    @model_validator(mode='after')
    def validate_variables(self) -> InnerProductPoly:
        """The polynomial has one variable per edge."""
        if self.poly.nvars != edge_count(self.i):
            msg = f'Expected {edge_count(self.i)} edge variables for i={self.i}, got {self.poly.nvars}'
            raise VariableCountError(msg)
        return self

    def degree(self) -> float:
        """Total degree in the edge variables."""
        return self.poly.degree()

    def evaluate_on(self, points: Sequence[Sequence[Scalar]]) -> Scalar:
        """q evaluated at the inner products of the given points."""
        return self.poly.evaluate(inner_products(points))


@functools.cache
def _dot_poly(i: int, k: int, kp: int, precision_bits: int) -> SparsePoly:
    nvars = 3 * i
    total = SparsePoly.zero(nvars, precision_bits)
    for c in range(3):
        total += SparsePoly.variable(3 * k + c, nvars, precision_bits) * SparsePoly.variable(
            3 * kp + c, nvars, precision_bits
        )
    return total


def _extended_pairs(i: int) -> list[tuple[int, int]]:
    return [*edges(i), *((k, k) for k in range(i))]


@functools.cache
def _expand_extended(i: int, exponents: Exponents, precision_bits: int) -> SparsePoly:
    """Cartesian expansion of a monomial in edge and norm variables."""
    result = SparsePoly.constant(1, 3 * i, precision_bits)
    for (k, kp), power in zip(_extended_pairs(i), exponents, strict=True):
        if power:
            result *= _dot_poly(i, k, kp, precision_bits) ** power
    return result


def expand_edge_monomial(
    i: int,
    exponents: Sequence[int],
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> SparsePoly:
    """Expand prod over edges of (x_k . x_k')^e into the 3i cartesian coordinates.

    Raises:
        VariableCountError: If there is not one exponent per edge

    """
    if not 0 <= i <= MAX_SUBSET_SIZE or len(exponents) != edge_count(i):
        msg = f'Expected {edge_count(i)} edge exponents for i={i}, got {len(exponents)}'
        raise VariableCountError(msg)
    return _expand_extended(i, (*exponents, *(0,) * i), precision_bits)


def _multidegree(i: int, exponents: Exponents) -> tuple[int, ...]:
    return tuple(sum(exponents[3 * a : 3 * a + 3]) for a in range(i))


@functools.cache
def _columns_by_multidegree(i: int, max_degree: int) -> dict[tuple[int, ...], list[Exponents]]:
    """Monomials in the C(i+1, 2) extended variables up to ``max_degree``, keyed by per-point degree."""
    pairs = _extended_pairs(i)
    grouped: dict[tuple[int, ...], list[Exponents]] = {}
    for total in range(max_degree + 1):
        for chosen in itertools.combinations_with_replacement(range(len(pairs)), total):
            exponents = [0] * len(pairs)
            point_degree = [0] * i
            for column in chosen:
                exponents[column] += 1
                k, kp = pairs[column]
                point_degree[k] += 1
                point_degree[kp] += 1
            grouped.setdefault(tuple(point_degree), []).append(tuple(exponents))
    return grouped


class CholeskyFactor:
    """Pivoted Cholesky factor P M P^T = L L^T stored column by column.

    Column k holds the entries of L below and on the diagonal, keyed by the
    original index of the row.
    """

    def __init__(self, size: int, order: list[int], columns: list[dict[int, Scalar]], precision_bits: int) -> None:
        self.size = size
        self.order = order
        self.columns = columns
        self.precision_bits = precision_bits

    def solve(self, rhs: Sequence[Scalar]) -> list[Scalar]:
        """Solve M x = rhs with one forward and one backward substitution."""
        ctx = scalar_context(self.precision_bits)
        work = [ctx.convert(v) for v in rhs]
        forward = []
        for pivot, column in zip(self.order, self.columns, strict=True):
            value = work[pivot] / column[pivot]
            forward.append(value)
            for row, entry in column.items():
                if row != pivot:
                    work[row] -= entry * value
        solution = [ctx.zero] * self.size
        for step in range(len(self.order) - 1, -1, -1):
            pivot, column = self.order[step], self.columns[step]
            acc = forward[step]
            for row, entry in column.items():
                if row != pivot:
                    acc -= entry * solution[row]
            solution[pivot] = acc / column[pivot]
        return solution


def cholesky_factorize(
    matrix: Mapping[tuple[int, int], Scalar],
    size: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> CholeskyFactor:
    """Factorize a sparse symmetric matrix given by its upper triangle (i <= j).

    The pivot at each step is the largest remaining diagonal entry; ties go
    to the smallest index.

    Raises:
        NotPositiveDefiniteError: If a pivot is not positive

    """
    ctx = scalar_context(precision_bits)
    rows: dict[int, dict[int, Scalar]] = {k: {} for k in range(size)}
    for (r, c), value in matrix.items():
        if r > c or not value:
            continue
        rows[r][c] = ctx.convert(value)
        rows[c][r] = ctx.convert(value)
    remaining = set(range(size))
    order: list[int] = []
    columns: list[dict[int, Scalar]] = []
    while remaining:
        pivot = max(sorted(remaining), key=lambda k: rows[k].get(k, ctx.zero))
        diagonal = rows[pivot].get(pivot, ctx.zero)
        if diagonal <= 0:
            msg = f'Nonpositive pivot {diagonal} at step {len(order)} (index {pivot})'
            raise NotPositiveDefiniteError(msg)
        root = ctx.sqrt(diagonal)
        remaining.discard(pivot)
        column = {pivot: root}
        for row, value in rows[pivot].items():
            if row in remaining:
                column[row] = value / root
        support = [row for row in column if row != pivot]
        for a in support:
            target = rows[a]
            la = column[a]
            for b in support:
                target[b] = target.get(b, ctx.zero) - la * column[b]
            target.pop(pivot, None)
        rows.pop(pivot)
        order.append(pivot)
        columns.append(column)
    return CholeskyFactor(size, order, columns, precision_bits)


def pivoted_sparse_cholesky(
    matrix: Mapping[tuple[int, int], Scalar],
    rhs: Sequence[Scalar],
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> list[Scalar]:
    """Solve M x = rhs for sparse symmetric positive definite M (upper triangle given)."""
    return cholesky_factorize(matrix, len(rhs), precision_bits).solve(rhs)


class SparseLinearSystem(BaseModel):
    """Expansion matrix of one per-point-degree block.

    Rows are cartesian monomials, columns are monomials in the edge and norm
    variables; ``row_entries[mono]`` lists the nonzero (column, value) pairs.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    i: int
    multidegree: tuple[int, ...]
    columns: list[tuple[int, ...]]
    row_entries: dict[tuple[int, ...], list[tuple[int, Scalar]]]

    @classmethod
    def build(
        cls,
        i: int,
        multidegree: tuple[int, ...],
        columns: list[Exponents],
        precision_bits: int,
    ) -> SparseLinearSystem:
        """Expand every column and transpose the result into rows."""
        row_entries: dict[Exponents, list[tuple[int, Scalar]]] = {}
        for index, column in enumerate(columns):
            for monomial, value in _expand_extended(i, column, precision_bits).items():
                row_entries.setdefault(monomial, []).append((index, value))
        # entries come straight from expansion; skip per-item validation of large maps
        return cls.model_construct(i=i, multidegree=multidegree, columns=columns, row_entries=row_entries)

    def normal_matrix(self, shift: Scalar) -> dict[tuple[int, int], Scalar]:
        """Upper triangle of A^T A + shift I, accumulated one row at a time."""
        gram: dict[tuple[int, int], Scalar] = {}
        for entries in self.row_entries.values():
            for a, (ca, va) in enumerate(entries):
                for cb, vb in entries[a:]:
                    key = (ca, cb) if ca <= cb else (cb, ca)
                    gram[key] = gram[key] + va * vb if key in gram else va * vb
        for k in range(len(self.columns)):
            gram[k, k] = gram.get((k, k), 0) + shift
        return gram

    def rhs_for(self, target: Mapping[Exponents, Scalar]) -> list[Scalar]:
        """A^T b for the coefficient vector b of a target polynomial."""
        result = [0] * len(self.columns)
        for monomial, value in target.items():
            for column, entry in self.row_entries.get(monomial, ()):
                result[column] += entry * value
        return result


class _BlockSolver:
    def __init__(self, system: SparseLinearSystem, shift: Scalar, precision_bits: int) -> None:
        self.system = system
        gram = system.normal_matrix(shift)
        self.factor = cholesky_factorize(gram, len(system.columns), precision_bits)
        for k in range(len(system.columns)):
            gram[k, k] -= shift
        self.gram = gram

    def _apply_gram(self, vector: Sequence[Scalar]) -> list[Scalar]:
        result = [0] * len(vector)
        for (a, b), value in self.gram.items():
            result[a] += value * vector[b]
            if a != b:
                result[b] += value * vector[a]
        return result

    def solve(self, target: Mapping[Exponents, Scalar]) -> list[Scalar]:
        rhs = self.system.rhs_for(target)
        solution = self.factor.solve(rhs)
        for _ in range(REFINEMENT_STEPS):
            residual = [r - g for r, g in zip(rhs, self._apply_gram(solution), strict=True)]
            correction = self.factor.solve(residual)
            solution = [x + c for x, c in zip(solution, correction, strict=True)]
        return solution


@functools.cache
def _verification_points(i: int, precision_bits: int) -> list[list[tuple[Scalar, Scalar, Scalar]]]:
    rng = np.random.default_rng(VERIFICATION_SEED + i)
    flat = random_unit_vectors(rng, VERIFICATION_SAMPLES * i, precision_bits)
    return [flat[k * i : (k + 1) * i] for k in range(VERIFICATION_SAMPLES)]


def verify_rewrite(p: SparsePoly, q: InnerProductPoly) -> Scalar:
    """Largest sampled |p(x) - q(u(x))| over the fixed verification tuples.

    Raises:
        RewriteVerificationError: If the residual exceeds 2^(-p/2) times the l1 norm of p

    """
    ctx = p.ctx
    scale = max(ctx.one, ctx.fsum(abs(c) for _, c in p.items()))
    tolerance = check_tolerance(p.precision_bits) * scale
    worst = ctx.zero
    for points in _verification_points(q.i, p.precision_bits):
        flat = [coordinate for point in points for coordinate in point]
        worst = max(worst, abs(p.evaluate(flat) - q.evaluate_on(points)))
    if worst > tolerance:
        raise RewriteVerificationError(float(worst), float(tolerance))
    return worst


class InnerProductRewriter:
    """Rewrites invariant polynomials of i points with edge-variable degree at most d.

    Factorizations are cached per per-point degree, so one rewriter should be
    reused for every polynomial of the same (i, d).
    """

    def __init__(
        self,
        i: int,
        d: int,
        precision_bits: int = DEFAULT_PRECISION_BITS,
        epsilon_shift: int = 0,
    ) -> None:
        """Prepare an empty factor cache.

        Args:
            i: Number of points, 2 to 4
            d: Largest degree of q in the inner products
            precision_bits: Working precision
            epsilon_shift: Offset in bits of the regularization 2^(-precision_bits/2 + shift)

        """
        if not 2 <= i <= MAX_SUBSET_SIZE:
            msg = f'Inner-product rewriting needs 2 <= i <= {MAX_SUBSET_SIZE}, got {i}'
            raise VariableCountError(msg)
        self.i = i
        self.d = d
        self.precision_bits = precision_bits
        ctx = scalar_context(precision_bits)
        self.epsilon = ctx.ldexp(ctx.one, -(precision_bits // 2) + epsilon_shift)
        self._solvers: dict[tuple[int, ...], _BlockSolver | None] = {}

    def _solver(self, multidegree: tuple[int, ...]) -> _BlockSolver | None:
        if multidegree not in self._solvers:
            columns = _columns_by_multidegree(self.i, self.d).get(multidegree)
            if columns is None:
                self._solvers[multidegree] = None
            else:
                started = time.perf_counter()
                system = SparseLinearSystem.build(self.i, multidegree, columns, self.precision_bits)
                self._solvers[multidegree] = _BlockSolver(system, self.epsilon, self.precision_bits)
                logger.debug(
                    'Factorized block %s of i=%d: %d rows, %d columns in %.2fs',
                    multidegree,
                    self.i,
                    len(system.row_entries),
                    len(columns),
                    time.perf_counter() - started,
                )
        return self._solvers[multidegree]

    def rewrite(self, p: SparsePoly, *, verify: bool = True) -> InnerProductPoly:
        """Find q with p(x_1..x_i) = q(x_k . x_k') on the product of spheres.

        Raises:
            VariableCountError: If p is not in 3i variables
            DegreeError: If p has degree above 2d
            RewriteVerificationError: If the sampled identity check fails

        """
        if p.nvars != 3 * self.i:
            msg = f'Expected a polynomial in {3 * self.i} variables, got {p.nvars}'
            raise VariableCountError(msg)
        if p.degree() > 2 * self.d:
            msg = f'Degree {p.degree()} exceeds 2d = {2 * self.d}'
            raise DegreeError(msg)
        target = p.to_real()
        grouped: dict[tuple[int, ...], dict[Exponents, Scalar]] = {}
        for monomial, value in target.items():
            grouped.setdefault(_multidegree(self.i, monomial), {})[monomial] = value
        extended_terms: dict[Exponents, Scalar] = {}
        for multidegree, block in grouped.items():
            solver = self._solver(multidegree)
            if solver is None:
                continue
            for column, value in zip(solver.system.columns, solver.solve(block), strict=True):
                extended_terms[column] = value
        nedges = edge_count(self.i)
        extended = SparsePoly(nedges + self.i, extended_terms, self.precision_bits)
        norms_to_one = {nedges + k: 1 for k in range(self.i)}
        q = InnerProductPoly(i=self.i, poly=extended.specialize(norms_to_one))
        if verify:
            verify_rewrite(target, q)
        return q


def rewrite_in_inner_products(
    p: SparsePoly,
    i: int,
    d: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> InnerProductPoly:
    """One-off rewrite of an invariant polynomial of i points; see ``InnerProductRewriter``."""
    return InnerProductRewriter(i, d, precision_bits).rewrite(p)


@functools.cache
def edge_action_image(i: int) -> PermGroup:
    """Image of S_i acting on the edges of the complete graph K_i."""
    if not 2 <= i <= MAX_SUBSET_SIZE:
        msg = f'Edge groups are available for 2 <= i <= {MAX_SUBSET_SIZE}, got {i}'
        raise VariableCountError(msg)
    edge_list = edges(i)
    position = {edge: k for k, edge in enumerate(edge_list)}

    def on_edges(vertex_perm: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(position[tuple(sorted((vertex_perm[k], vertex_perm[kp])))] for k, kp in edge_list)

    generators = [tuple(k + 1 if j == k else k if j == k + 1 else j for j in range(i)) for k in range(i - 1)]
    return PermGroup.from_action(i, generators, len(edge_list), on_edges)


def symmetrize_poly(poly: SparsePoly, group: PermGroup) -> SparsePoly:
    """Average of a polynomial over a permutation group of its variables."""
    total = SparsePoly.zero(poly.nvars, poly.precision_bits)
    for element in group.elements:
        total += act_on_poly(element, poly)
    return total.scale(poly.ctx.one / group.order)


def symmetrize_q(q: InnerProductPoly) -> InnerProductPoly:
    """Average q over the edge action of S_i."""
    return InnerProductPoly(i=q.i, poly=symmetrize_poly(q.poly, edge_action_image(q.i)))


def _subset_pair_orbits(size: int, cardinalities: tuple[int, int]) -> list[tuple[tuple[tuple[int, ...], tuple[int, ...]], int]]:
    """Representatives and orbit sizes of ordered subset pairs under S_size."""
    pairs = [pair for pair in subset_pairs(size) if (len(pair[0]), len(pair[1])) == cardinalities]
    remaining = set(pairs)
    orbits = []
    for pair in pairs:
        if pair not in remaining:
            continue
        orbit = {
            (tuple(sorted(perm[k] for k in pair[0])), tuple(sorted(perm[k] for k in pair[1])))
            for perm in itertools.permutations(range(size))
        }
        remaining.difference_update(orbit)
        orbits.append((pair, len(orbit)))
    return orbits


def a2_inner_product_form(
    blocks: ZonalBlockSet,
    a: int,
    b: int,
    size: int,
    rewriter: InnerProductRewriter | None = None,
) -> SparsePoly:
    """A_2 applied to zonal entry (a, b), restricted to sets of ``size`` points, in edge variables.

    Sizes 0 and 1 give constants (polynomials in no variables). For larger
    sets one representative per S_size orbit of subset pairs is rewritten and
    the orbit sum is recovered by symmetrization.
    """
    kernel = blocks.kernel(a, b)
    bits = blocks.entries[a, b].precision_bits
    if size <= 1:
        applied = apply_A2(kernel, size, bits)
        value = applied.coefficient(()) if size == 0 else sphere_inner_product(applied, SparsePoly.constant(1, 3, bits))
        return SparsePoly.constant(value.real, 0, bits)
    if rewriter is None or rewriter.i != size:
        msg = f'A rewriter for i={size} is required'
        raise VariableCountError(msg)
    entry = blocks.entries[a, b]
    nvars = 3 * size
    total = SparsePoly.zero(edge_count(size), bits)
    for (first, second), orbit_size in _subset_pair_orbits(size, blocks.cardinalities(a, b)):
        slots = [3 * point + c for point in first + second for c in range(3)]
        term = entry.relabel(slots, nvars)
        total += rewriter.rewrite(term).poly.scale(orbit_size)
    return symmetrize_poly(total, edge_action_image(size))
