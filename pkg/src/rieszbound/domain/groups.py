"""Permutation groups on variables, their orthogonal irreps, and symmetry-adapted bases.

Permutations are tuples ``p`` with ``p[k]`` the image of point ``k``;
composition is ``(p * q)[k] = p[q[k]]``. A permutation acts on polynomials by
moving variable ``k`` to slot ``p[k]``, which is a left action.

Every group handled here comes from vertex permutations (of the points of a
subset) acting on edge variables. The vertex permutation behind each element
is kept in ``sources``; stabilizers that occur are Young subgroups, whose
irreps are Kronecker products of Young's orthogonal form.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from collections import deque
from typing import TYPE_CHECKING, Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from rieszbound.domain.exceptions import GroupError, MolienConsistencyError
from rieszbound.domain.polycore import (
    DEFAULT_PRECISION_BITS,
    SparsePoly,
    check_tolerance,
    grlex_key,
    scalar_context,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

    from rieszbound.domain.polycore import Exponents, Scalar

logger = logging.getLogger(__name__)

Perm = tuple[int, ...]

MAX_SYMMETRIC_DEGREE = 4


def compose(p: Perm, q: Perm) -> Perm:
    """The permutation applying q first, then p."""
    return tuple(p[k] for k in q)


def inverse(p: Perm) -> Perm:
    """Inverse permutation."""
    result = [0] * len(p)
    for k, image in enumerate(p):
        result[image] = k
    return tuple(result)


def act_on_exponents(perm: Perm, exponents: Exponents) -> Exponents:
    """Image of a monomial when variable k moves to slot perm[k]."""
    moved = [0] * len(exponents)
    for k, power in enumerate(exponents):
        moved[perm[k]] = power
    return tuple(moved)


def act_on_poly(perm: Perm, poly: SparsePoly) -> SparsePoly:
    """Image of a polynomial under the variable permutation."""
    return poly.relabel(perm, poly.nvars)


class PermGroup(BaseModel):
    """A finite group of permutations of ``degree`` points."""

    model_config = ConfigDict(frozen=True)

    degree: int = Field(..., ge=1, description='Number of points acted on')
    elements: list[Perm] = Field(..., description='All group elements, identity first')
    generators: list[Perm] = Field(default_factory=list)
    sources: list[Perm] = Field(
        default_factory=list,
        description='Vertex permutation realizing each element (aligned with elements)',
    )

    @model_validator(mode='after')
    def validate_group(self) -> PermGroup:
        """Identity first, closure, and Lagrange's theorem."""
        identity = tuple(range(self.degree))
        if not self.elements or self.elements[0] != identity:
            msg = 'Group elements must start with the identity'
            raise GroupError(msg)
        members = set(self.elements)
        if len(members) != len(self.elements):
            msg = 'Group elements must be distinct'
            raise GroupError(msg)
        if any(compose(g, h) not in members for g in self.generators or self.elements for h in self.elements):
            msg = 'Group elements are not closed under composition'
            raise GroupError(msg)
        if math.factorial(self.degree) % len(self.elements):
            msg = f'Order {len(self.elements)} does not divide {self.degree}!'
            raise GroupError(msg)
        if self.sources and len(self.sources) != len(self.elements):
            msg = 'Sources must align with elements'
            raise GroupError(msg)
        return self

    @property
    def order(self) -> int:
        """Number of elements."""
        return len(self.elements)

    @classmethod
    def trivial(cls, degree: int) -> PermGroup:
        """The group containing only the identity."""
        identity = tuple(range(degree))
        return cls(degree=degree, elements=[identity], generators=[], sources=[])

    @classmethod
    def from_action(
        cls,
        vertex_count: int,
        vertex_generators: Sequence[Perm],
        degree: int,
        action: Callable[[Perm], Perm],
    ) -> PermGroup:
        """Image of the group generated by vertex permutations under a permutation action.

        Elements are listed in breadth-first order from the identity; vertex
        permutations with the same image keep the first one found.
        """
        identity = tuple(range(vertex_count))
        seen = {identity}
        queue = deque([identity])
        vertex_elements = []
        while queue:
            current = queue.popleft()
            vertex_elements.append(current)
            for generator in vertex_generators:
                candidate = compose(generator, current)
                if candidate not in seen:
                    seen.add(candidate)
                    queue.append(candidate)
        elements: list[Perm] = []
        sources: list[Perm] = []
        for vertex_perm in vertex_elements:
            image = action(vertex_perm)
            if image not in elements:
                elements.append(image)
                sources.append(vertex_perm)
        generators = [action(g) for g in vertex_generators]
        return cls(degree=degree, elements=elements, generators=generators, sources=sources)

    def subgroup(self, keep: Callable[[Perm], bool]) -> PermGroup:
        """Elements satisfying ``keep``, which must form a subgroup."""
        chosen = [k for k, g in enumerate(self.elements) if keep(g)]
        return PermGroup(
            degree=self.degree,
            elements=[self.elements[k] for k in chosen],
            generators=[],
            sources=[self.sources[k] for k in chosen] if self.sources else [],
        )

    def vertex_permutations(self) -> list[Perm]:
        """Vertex permutation behind each element (the element itself when none is recorded)."""
        return self.sources or self.elements


def symmetric_group(n: int) -> PermGroup:
    """S_n acting on n points by itself."""
    generators = [tuple(k + 1 if j == k else k if j == k + 1 else j for j in range(n)) for k in range(n - 1)]
    return PermGroup.from_action(n, generators, n, lambda p: p)


def stabilizer(group: PermGroup, poly: SparsePoly) -> PermGroup:
    """Subgroup fixing ``poly`` coefficientwise under variable permutation."""
    if poly.nvars != group.degree:
        msg = f'Polynomial in {poly.nvars} variables for a group on {group.degree} points'
        raise GroupError(msg)
    return group.subgroup(lambda g: act_on_poly(g, poly).is_close(poly))


class OrthoIrrep(BaseModel):
    """A real orthogonal irreducible representation of a ``PermGroup``.

    ``matrices[k]`` represents ``group.elements[k]``; each matrix is a tuple of
    rows of working-precision scalars.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    dim: int
    matrices: list[tuple[tuple[Any, ...], ...]]

    def character(self, index: int) -> Scalar:
        """Trace of the matrix of element ``index``."""
        matrix = self.matrices[index]
        return sum(matrix[k][k] for k in range(self.dim))


def _partitions(n: int, largest: int | None = None) -> list[tuple[int, ...]]:
    top = n if largest is None else largest
    if n == 0:
        return [()]
    return [(first, *rest) for first in range(min(n, top), 0, -1) for rest in _partitions(n - first, first)]


def _standard_tableaux(shape: tuple[int, ...]) -> list[tuple[tuple[int, int], ...]]:
    """Standard tableaux as the (row, column) cell of each entry 0..n-1."""
    n = sum(shape)
    found: list[tuple[tuple[int, int], ...]] = []

    def extend(cells: list[tuple[int, int]], lengths: list[int]) -> None:
        if len(cells) == n:
            found.append(tuple(cells))
            return
        for row, length in enumerate(lengths):
            if length < shape[row] and (row == 0 or lengths[row - 1] > length):
                lengths[row] += 1
                cells.append((row, length))
                extend(cells, lengths)
                cells.pop()
                lengths[row] -= 1

    extend([], [0] * len(shape))
    return found


def _matmul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]], ctx: Any) -> tuple[tuple[Any, ...], ...]:  # noqa: ANN401
    size = len(b[0])
    return tuple(
        tuple(ctx.fsum(a[r][k] * b[k][c] for k in range(len(b))) for c in range(size)) for r in range(len(a))
    )


def _kron(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> tuple[tuple[Any, ...], ...]:
    rows_b, cols_b = len(b), len(b[0])
    return tuple(
        tuple(a[r // rows_b][c // cols_b] * b[r % rows_b][c % cols_b] for c in range(len(a[0]) * cols_b))
        for r in range(len(a) * rows_b)
    )


@functools.cache
def young_irreps(n: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> list[OrthoIrrep]:
    """Irreps of S_n (as ``symmetric_group(n)``) in Young's orthogonal form.

    Raises:
        GroupError: If n is outside 1..4

    """
    if not 1 <= n <= MAX_SYMMETRIC_DEGREE:
        msg = f'Young irreps are supported for 1 <= n <= {MAX_SYMMETRIC_DEGREE}, got {n}'
        raise GroupError(msg)
    ctx = scalar_context(precision_bits)
    group = symmetric_group(n)
    irreps = []
    for shape in _partitions(n):
        tableaux = _standard_tableaux(shape)
        position = {t: k for k, t in enumerate(tableaux)}
        dim = len(tableaux)
        generator_matrices = {}
        for k in range(n - 1):
            matrix = [[ctx.zero] * dim for _ in range(dim)]
            for column, tableau in enumerate(tableaux):
                (row_a, col_a), (row_b, col_b) = tableau[k], tableau[k + 1]
                axial = (col_b - row_b) - (col_a - row_a)
                matrix[column][column] = ctx.one / axial
                swapped = list(tableau)
                swapped[k], swapped[k + 1] = swapped[k + 1], swapped[k]
                partner = position.get(tuple(swapped))
                if partner is not None:
                    matrix[partner][column] = ctx.sqrt(1 - ctx.one / axial**2)
            transposition = tuple(k + 1 if j == k else k if j == k + 1 else j for j in range(n))
            generator_matrices[transposition] = tuple(tuple(row) for row in matrix)
        identity = tuple(tuple(ctx.one if r == c else ctx.zero for c in range(dim)) for r in range(dim))
        representation = {tuple(range(n)): identity}
        queue = deque([tuple(range(n))])
        while queue:
            current = queue.popleft()
            for generator, matrix in generator_matrices.items():
                candidate = compose(generator, current)
                if candidate not in representation:
                    representation[candidate] = _matmul(matrix, representation[current], ctx)
                    queue.append(candidate)
        name = '[' + ','.join(str(part) for part in shape) + ']'
        irreps.append(OrthoIrrep(name=name, dim=dim, matrices=[representation[g] for g in group.elements]))
    return irreps


def _vertex_orbits(vertex_perms: Iterable[Perm], vertex_count: int) -> list[tuple[int, ...]]:
    parent = list(range(vertex_count))

    def find(k: int) -> int:
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for perm in vertex_perms:
        for k, image in enumerate(perm):
            parent[find(k)] = find(image)
    orbits: dict[int, list[int]] = {}
    for k in range(vertex_count):
        orbits.setdefault(find(k), []).append(k)
    return [tuple(orbit) for orbit in sorted(orbits.values())]


def group_irreps(group: PermGroup, precision_bits: int = DEFAULT_PRECISION_BITS) -> list[OrthoIrrep]:
    """Irreps of a group whose vertex action is a Young subgroup S_A x S_B x ...

    Raises:
        GroupError: If the vertex action is not the full product of symmetric groups on its orbits

    """
    vertex_perms = group.vertex_permutations()
    vertex_count = len(vertex_perms[0])
    orbits = _vertex_orbits(vertex_perms, vertex_count)
    if math.prod(math.factorial(len(orbit)) for orbit in orbits) != group.order:
        msg = f'Group of order {group.order} with vertex orbits {orbits} is not a Young subgroup'
        raise GroupError(msg)
    factor_irreps = [young_irreps(len(orbit), precision_bits) for orbit in orbits]
    factor_index = [
        {g: k for k, g in enumerate(symmetric_group(len(orbit)).elements)} for orbit in orbits
    ]
    restricted = []
    for perm in vertex_perms:
        parts = []
        for orbit, lookup in zip(orbits, factor_index, strict=True):
            local = {point: k for k, point in enumerate(orbit)}
            parts.append(lookup[tuple(local[perm[point]] for point in orbit)])
        restricted.append(parts)
    irreps = []
    for combination in itertools.product(*factor_irreps):
        matrices = []
        for parts in restricted:
            matrix = combination[0].matrices[parts[0]]
            for factor, part in zip(combination[1:], parts[1:], strict=True):
                matrix = _kron(matrix, factor.matrices[part])
            matrices.append(matrix)
        name = 'x'.join(irrep.name for irrep in combination)
        dim = math.prod(irrep.dim for irrep in combination)
        irreps.append(OrthoIrrep(name=name, dim=dim, matrices=matrices))
    return irreps


class MolienTable(BaseModel):
    """Multiplicity of each irrep in each homogeneous degree of the polynomial ring."""

    model_config = ConfigDict(frozen=True)

    nvars: int
    dims: dict[str, int]
    multiplicities: dict[str, list[int]] = Field(..., description='Irrep name -> multiplicity per degree')

    def cumulative(self, name: str, degree: int) -> int:
        """Multiplicity of an irrep among polynomials of degree at most ``degree``."""
        return sum(self.multiplicities[name][: degree + 1]) if degree >= 0 else 0

    def largest_block(self, degree: int) -> int:
        """Largest cumulative multiplicity over the irreps (0 for negative degree)."""
        return max((self.cumulative(name, degree) for name in self.multiplicities), default=0)

    def block_sizes(self, degree: int) -> dict[str, int]:
        """Cumulative multiplicities of all irreps up to ``degree``."""
        return {name: self.cumulative(name, degree) for name in self.multiplicities}


def _cycle_lengths(perm: Perm) -> list[int]:
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length, k = 0, start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        lengths.append(length)
    return lengths


def _cycle_series(perm: Perm, max_degree: int) -> list[int]:
    """Coefficients of 1/det(I - tL) = prod over cycles of 1/(1 - t^len)."""
    series = [1] + [0] * max_degree
    for length in _cycle_lengths(perm):
        for k in range(length, max_degree + 1):
            series[k] += series[k - length]
    return series


def molien(
    group: PermGroup,
    irreps: Sequence[OrthoIrrep],
    max_degree: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> MolienTable:
    """Irrep multiplicities in each degree via Molien's formula for permutation actions.

    Raises:
        MolienConsistencyError: If a multiplicity is not within 1/4 of a nonnegative integer

    """
    ctx = scalar_context(precision_bits)
    series = [_cycle_series(g, max_degree) for g in group.elements]
    multiplicities = {}
    for irrep in irreps:
        characters = [irrep.character(k) for k in range(group.order)]
        counts = []
        for degree in range(max_degree + 1):
            value = ctx.fsum(characters[k] * series[k][degree] for k in range(group.order)) / group.order
            rounded = int(ctx.nint(value))
            if abs(value - rounded) >= 0.25 or rounded < 0:
                msg = f'Multiplicity of {irrep.name} in degree {degree} is {value}, not an integer'
                raise MolienConsistencyError(msg)
            counts.append(rounded)
        multiplicities[irrep.name] = counts
    return MolienTable(
        nvars=group.degree,
        dims={irrep.name: irrep.dim for irrep in irreps},
        multiplicities=multiplicities,
    )


def monomials_up_to(nvars: int, degree: int) -> list[Exponents]:
    """All exponent tuples of total degree at most ``degree`` in graded-lex order."""
    found = [
        tuple(exps)
        for total in range(degree + 1)
        for exps in itertools.product(range(total + 1), repeat=nvars)
        if sum(exps) == total
    ]
    return sorted(found, key=grlex_key)


class SymmetryAdaptedMonomialBasis(BaseModel):
    """Per irrep, a list of orbits of d_pi real polynomials transforming by that irrep."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nvars: int
    degree: int
    irreps: list[OrthoIrrep]
    blocks: dict[str, list[tuple[SparsePoly, ...]]]

    def multiplicity(self, name: str) -> int:
        """Number of copies of an irrep."""
        return len(self.blocks[name])


def _monomial_orbits(group: PermGroup, monomials: Sequence[Exponents]) -> list[list[Exponents]]:
    remaining = set(monomials)
    orbits = []
    for monomial in monomials:
        if monomial not in remaining:
            continue
        orbit = sorted({act_on_exponents(g, monomial) for g in group.elements}, key=grlex_key)
        remaining.difference_update(orbit)
        orbits.append(orbit)
    return orbits


def _projector_image(
    group: PermGroup,
    irrep: OrthoIrrep,
    row: int,
    vector: dict[Exponents, Scalar],
    ctx: Any,  # noqa: ANN401
) -> dict[Exponents, Scalar]:
    """Apply (d/|G|) sum_g rho(g)[row][0] L(g) to a vector in the monomial basis."""
    scale = ctx.mpf(irrep.dim) / group.order
    image: dict[Exponents, Scalar] = {}
    for k, g in enumerate(group.elements):
        weight = irrep.matrices[k][row][0]
        if not weight:
            continue
        for monomial, value in vector.items():
            target = act_on_exponents(g, monomial)
            image[target] = image.get(target, ctx.zero) + weight * value
    return {m: v * scale for m, v in image.items()}


def projection_basis(
    group: PermGroup,
    irreps: Sequence[OrthoIrrep],
    degree: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> SymmetryAdaptedMonomialBasis:
    """Symmetry-adapted orthonormal basis of polynomials of degree at most ``degree``.

    Raises:
        MolienConsistencyError: If a projector rank disagrees with Molien's multiplicity

    """
    ctx = scalar_context(precision_bits)
    tolerance = check_tolerance(precision_bits)
    monomials = monomials_up_to(group.degree, degree)
    orbits = _monomial_orbits(group, monomials)
    table = molien(group, irreps, degree, precision_bits)
    blocks: dict[str, list[tuple[SparsePoly, ...]]] = {}
    for irrep in irreps:
        found: list[tuple[SparsePoly, ...]] = []
        for orbit in orbits:
            kept: list[dict[Exponents, Scalar]] = []
            for monomial in orbit:
                candidate = _projector_image(group, irrep, 0, {monomial: ctx.one}, ctx)
                # two passes of Gram-Schmidt keep the basis orthonormal at working precision
                for _ in range(2):
                    for basis_vector in kept:
                        overlap = ctx.fsum(basis_vector[m] * candidate.get(m, ctx.zero) for m in basis_vector)
                        for m, v in basis_vector.items():
                            candidate[m] = candidate.get(m, ctx.zero) - overlap * v
                norm = ctx.sqrt(ctx.fsum(v * v for v in candidate.values()))
                if norm > tolerance:
                    kept.append({m: v / norm for m, v in candidate.items() if v})
            for first in kept:
                copies = [first] + [_projector_image(group, irrep, j, first, ctx) for j in range(1, irrep.dim)]
                found.append(tuple(SparsePoly(group.degree, vector, precision_bits) for vector in copies))
        expected = table.cumulative(irrep.name, degree)
        if len(found) != expected:
            msg = f'Projector rank {len(found)} for {irrep.name} disagrees with Molien multiplicity {expected}'
            raise MolienConsistencyError(msg)
        blocks[irrep.name] = found
    logger.debug(
        'Projection basis on %d variables up to degree %d: %s',
        group.degree,
        degree,
        {name: len(b) for name, b in blocks.items()},
    )
    return SymmetryAdaptedMonomialBasis(nvars=group.degree, degree=degree, irreps=list(irreps), blocks=blocks)


def modified_zonal(basis: SymmetryAdaptedMonomialBasis) -> dict[str, list[list[SparsePoly]]]:
    """Per irrep, the symmetric matrix Z[a][b] = sum_j e_{a,j} e_{b,j} of polynomials."""
    matrices = {}
    for name, orbits in basis.blocks.items():
        size = len(orbits)
        matrix = [[SparsePoly.zero(basis.nvars) for _ in range(size)] for _ in range(size)]
        for a in range(size):
            for b in range(a, size):
                entry = SparsePoly.zero(basis.nvars, orbits[a][0].precision_bits)
                for left, right in zip(orbits[a], orbits[b], strict=True):
                    entry += left * right
                matrix[a][b] = entry
                matrix[b][a] = entry
        matrices[name] = matrix
    return matrices
