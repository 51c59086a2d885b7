"""Sum-of-squares models of the semialgebraic constraints on point pairs, triples and quadruples.

Coefficients of the polynomials involved depend affinely on the variables of
the final program. They are carried as a ``PolyForm``: a constant polynomial
plus one polynomial per variable. Variables are addressed by ``VarKey``
(block name, row, column); scalar variables use row = column = 0 and a block
name registered as a scalar.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import TYPE_CHECKING, Any, Literal, NamedTuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from rieszbound.domain.exceptions import (
    DegreeError,
    GroupError,
    InconsistentConstraintError,
    ThresholdError,
    VariableCountError,
)
from rieszbound.domain.groups import (
    act_on_poly,
    group_irreps,
    modified_zonal,
    molien,
    monomials_up_to,
    projection_basis,
    stabilizer,
)
from rieszbound.domain.invariants import (
    edge_action_image,
    edge_count,
    edges,
    inner_products,
    sample_independent_sets,
)
from rieszbound.domain.polycore import (
    DEFAULT_PRECISION_BITS,
    SparsePoly,
    drop_tolerance,
    grlex_key,
    scalar_context,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Mapping, Sequence

    import numpy as np

    from rieszbound.domain.groups import MolienTable, Perm, PermGroup
    from rieszbound.domain.polycore import Exponents, Scalar

logger = logging.getLogger(__name__)

PairForm = Literal['auto', 'w', 'u']

#: Degree of the free multiplier of det E(u) is delta minus this.
DET_MULTIPLIER_DEGREE_GAP = 6


class VarKey(NamedTuple):
    """Address of one program variable: an upper-triangle entry of a block, or a scalar."""

    block: str
    row: int = 0
    col: int = 0


class PolyForm:
    """Polynomial whose coefficients are affine in program variables.

    Represents ``constant + sum over keys of var[key] * parts[key]``.
    """

    __slots__ = ('constant', 'nvars', 'parts')

    def __init__(self, nvars: int, constant: SparsePoly | None = None, parts: Mapping[VarKey, SparsePoly] | None = None) -> None:
        self.nvars = nvars
        bits = constant.precision_bits if constant is not None else DEFAULT_PRECISION_BITS
        self.constant = constant if constant is not None else SparsePoly.zero(nvars, bits)
        self.parts = {key: poly for key, poly in (parts or {}).items() if not poly.is_zero()}
        for poly in (self.constant, *self.parts.values()):
            if poly.nvars != nvars:
                msg = f'Form in {nvars} variables got a part in {poly.nvars}'
                raise VariableCountError(msg)

    @classmethod
    def accumulate(
        cls,
        nvars: int,
        items: Iterable[tuple[VarKey, SparsePoly]],
        constant: SparsePoly | None = None,
    ) -> PolyForm:
        """Sum variable contributions, merging repeated keys."""
        parts: dict[VarKey, SparsePoly] = {}
        for key, poly in items:
            parts[key] = parts[key] + poly if key in parts else poly
        return cls(nvars, constant, parts)

    @property
    def precision_bits(self) -> int:
        """Working precision of the coefficients."""
        return self.constant.precision_bits

    def __add__(self, other: PolyForm) -> PolyForm:
        parts = dict(self.parts)
        for key, poly in other.parts.items():
            parts[key] = parts[key] + poly if key in parts else poly
        return PolyForm(self.nvars, self.constant + other.constant, parts)

    def __neg__(self) -> PolyForm:
        return self.map(lambda poly: -poly)

    def map(self, transform: Callable[[SparsePoly], SparsePoly]) -> PolyForm:
        """Apply a linear map of polynomials to the constant and every part."""
        constant = transform(self.constant)
        return PolyForm(constant.nvars, constant, {key: transform(poly) for key, poly in self.parts.items()})

    def times(self, factor: SparsePoly) -> PolyForm:
        """Multiply by a fixed polynomial."""
        return self.map(lambda poly: poly * factor)

    def degree(self) -> float:
        """Largest degree over the constant and all parts."""
        return max((poly.degree() for poly in (self.constant, *self.parts.values())), default=-math.inf)

    def variables(self) -> list[VarKey]:
        """Keys with a nonzero part, sorted."""
        return sorted(self.parts)

    def evaluate(self, assignment: Mapping[VarKey, object]) -> SparsePoly:
        """Substitute values for the program variables (missing keys count as zero)."""
        total = self.constant
        for key, poly in self.parts.items():
            value = assignment.get(key)
            if value is not None:
                total += poly.scale(value)
        return total


class Generator(BaseModel):
    """One polynomial in the description of a semialgebraic set."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    family: Literal['edge', 'minor2', 'minor3', 'det']
    poly: SparsePoly


class SemialgebraicSet(BaseModel):
    """Edge-variable vectors of independent sets of i points: inequalities g >= 0 and equalities g = 0."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    i: int
    U: Any = Field(..., description='Inner-product threshold of the packing graph')
    inequalities: list[Generator]
    equalities: list[Generator]

    @model_validator(mode='after')
    def validate_threshold(self) -> SemialgebraicSet:
        """U lies strictly between -1 and 1."""
        if not -1 < self.U < 1:
            msg = f'Threshold U must lie in (-1, 1), got {self.U}'
            raise ThresholdError(msg)
        return self

    def contains(self, u: Sequence[object], tolerance: float = 1e-20) -> bool:
        """Whether a point satisfies every generator within ``tolerance``."""
        return all(g.poly.evaluate(u) >= -tolerance for g in self.inequalities) and all(
            abs(g.poly.evaluate(u)) <= tolerance for g in self.equalities
        )


def gram_matrix(i: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> list[list[SparsePoly]]:
    """The i x i matrix E(u) with unit diagonal and u_e off the diagonal."""
    nvars = edge_count(i)
    one = SparsePoly.constant(1, nvars, precision_bits)
    matrix = [[one for _ in range(i)] for _ in range(i)]
    for index, (k, kp) in enumerate(edges(i)):
        variable = SparsePoly.variable(index, nvars, precision_bits)
        matrix[k][kp] = variable
        matrix[kp][k] = variable
    return matrix


def poly_determinant(matrix: Sequence[Sequence[SparsePoly]]) -> SparsePoly:
    """Determinant by cofactor expansion along the first row."""
    size = len(matrix)
    if size == 1:
        return matrix[0][0]
    total = SparsePoly.zero(matrix[0][0].nvars, matrix[0][0].precision_bits)
    for column in range(size):
        minor = [row[:column] + row[column + 1 :] for row in matrix[1:]]
        term = matrix[0][column] * poly_determinant(minor)
        total = total - term if column % 2 else total + term
    return total


def principal_minors(i: int, order: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> list[tuple[tuple[int, ...], SparsePoly]]:
    """Principal minors of E(u) of the given order, keyed by vertex subset."""
    matrix = gram_matrix(i, precision_bits)
    return [
        (subset, poly_determinant([[matrix[r][c] for c in subset] for r in subset]))
        for subset in itertools.combinations(range(i), order)
    ]


def build_P(i: int, U: Scalar | float, precision_bits: int = DEFAULT_PRECISION_BITS) -> SemialgebraicSet:
    """Semialgebraic description of the edge vectors of independent i-sets on the sphere.

    Raises:
        VariableCountError: If i is not 3 or 4

    """
    if i not in {3, 4}:
        msg = f'Semialgebraic sets are built for i in (3, 4), got {i}'
        raise VariableCountError(msg)
    nvars = edge_count(i)
    inequalities = [
        Generator(
            name=f'edge_{edge[0]}{edge[1]}',
            family='edge',
            poly=SparsePoly.constant(U, nvars, precision_bits) - SparsePoly.variable(index, nvars, precision_bits),
        )
        for index, edge in enumerate(edges(i))
    ]
    for order, family in ((2, 'minor2'), (3, 'minor3')):
        inequalities.extend(
            Generator(name=f'{family}_{"".join(map(str, subset))}', family=family, poly=poly)
            for subset, poly in principal_minors(i, order, precision_bits)
        )
    equalities = [
        Generator(name=f'det_{"".join(map(str, subset))}', family='det', poly=poly) for subset, poly in principal_minors(i, 4, precision_bits)
    ] if i == 4 else []
    return SemialgebraicSet(i=i, U=U, inequalities=inequalities, equalities=equalities)


def sample_P(
    i: int,
    U: Scalar | float,
    count: int,
    rng: np.random.Generator,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> list[list[Scalar]]:
    """Edge vectors of random independent i-sets, sampled by rejection on the sphere."""
    return [inner_products(points) for points in sample_independent_sets(i, U, count, rng, precision_bits)]


class BlockSpec(BaseModel):
    """A PSD matrix variable of the program."""

    model_config = ConfigDict(frozen=True)

    name: str
    size: int = Field(..., ge=1)


class SosTerm(BaseModel):
    """A generator orbit times one PSD block: sum over members gamma of L(gamma)(g * <Q, Z>).

    For a plain block the orbit is the generator alone and Z[r][c] = v_r v_c
    for the monomial vector v.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    block: BlockSpec
    generator: SparsePoly
    transports: list[tuple[int, ...]] = Field(..., description='Edge permutations carrying the generator to each orbit member')
    kernel: dict[tuple[int, int], SparsePoly] = Field(..., description='Upper triangle of the polynomial matrix Z')

    def contribution(self) -> PolyForm:
        """The term as a form in the entries of the block."""
        items = []
        for (r, c), entry in self.kernel.items():
            base = self.generator * entry
            moved = base if len(self.transports) == 1 else sum(
                (act_on_poly(perm, base) for perm in self.transports[1:]),
                start=act_on_poly(self.transports[0], base),
            )
            items.append((VarKey(self.block.name, r, c), moved.scale(2) if r != c else moved))
        return PolyForm.accumulate(self.generator.nvars, items, SparsePoly.zero(self.generator.nvars, self.generator.precision_bits))


class FreeTerm(BaseModel):
    """Equality generator times sum over monomials of (q_plus - q_minus) u^alpha."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    generator: SparsePoly
    monomials: list[tuple[int, ...]]
    prefix: str

    def scalar_names(self) -> list[str]:
        """Names of the sign-split scalars, plus before minus per monomial."""
        return [f'{self.prefix}{sign}{"".join(map(str, alpha))}' for alpha in self.monomials for sign in '+-']

    def contribution(self) -> PolyForm:
        """The term as a form in the sign-split scalars."""
        nvars, bits = self.generator.nvars, self.generator.precision_bits
        items = []
        names = iter(self.scalar_names())
        for alpha in self.monomials:
            product = self.generator * SparsePoly.monomial(alpha, 1, bits)
            items.append((VarKey(next(names)), product))
            items.append((VarKey(next(names)), -product))
        return PolyForm.accumulate(nvars, items, SparsePoly.zero(nvars, bits))


class SosIdentity(BaseModel):
    """target + sum of SOS terms + free terms = 0, coefficientwise."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    target: PolyForm
    terms: list[SosTerm] = Field(default_factory=list)
    free_terms: list[FreeTerm] = Field(default_factory=list)

    def blocks(self) -> list[BlockSpec]:
        """PSD blocks in order of first use."""
        seen: dict[str, BlockSpec] = {}
        for term in self.terms:
            seen.setdefault(term.block.name, term.block)
        return list(seen.values())

    def scalars(self) -> list[str]:
        """Nonnegative scalars introduced by the free terms."""
        return [name for term in self.free_terms for name in term.scalar_names()]

    def total(self) -> PolyForm:
        """Left side of the identity as one form."""
        result = self.target
        for part in (*self.terms, *self.free_terms):
            result += part.contribution()
        return result


class IdentityRow(NamedTuple):
    """One linear equation sum(coefficients[key] * var[key]) + constant = 0."""

    monomial: Exponents
    coefficients: dict[VarKey, Scalar]
    constant: Scalar


def assemble_identity_rows(identity: SosIdentity) -> list[IdentityRow]:
    """Equate coefficients of every monomial, in graded-lex order.

    Raises:
        InconsistentConstraintError: If a monomial carries a constant but no variable

    """
    form = identity.total()
    ctx = scalar_context(form.precision_bits)
    tolerance = drop_tolerance(form.precision_bits)
    by_monomial: dict[Exponents, dict[VarKey, Scalar]] = {}
    for key in form.variables():
        for monomial, value in form.parts[key].items():
            by_monomial.setdefault(monomial, {})[key] = value.real
    constants = {monomial: value.real for monomial, value in form.constant.items()}
    rows = []
    for monomial in sorted(set(by_monomial) | set(constants), key=grlex_key):
        coefficients = {key: v for key, v in by_monomial.get(monomial, {}).items() if abs(v) >= tolerance}
        constant = constants.get(monomial, ctx.zero)
        if not coefficients:
            if abs(constant) >= tolerance:
                msg = f'Identity {identity.name} requires {constant} = 0 at monomial {monomial}'
                raise InconsistentConstraintError(msg)
            continue
        rows.append(IdentityRow(monomial, coefficients, constant))
    logger.debug('Identity %s: %d rows', identity.name, len(rows))
    return rows


def _plain_kernel(nvars: int, h: int, precision_bits: int) -> dict[tuple[int, int], SparsePoly]:
    vector = [SparsePoly.monomial(alpha, 1, precision_bits) for alpha in monomials_up_to(nvars, h)]
    return {(r, c): vector[r] * vector[c] for r in range(len(vector)) for c in range(r, len(vector))}


def _plain_term(name: str, generator: SparsePoly, h: int) -> SosTerm:
    kernel = _plain_kernel(generator.nvars, h, generator.precision_bits)
    size = math.comb(generator.nvars + h, h)
    identity = tuple(range(generator.nvars))
    return SosTerm(block=BlockSpec(name=name, size=size), generator=generator, transports=[identity], kernel=kernel)


def lukacs_degrees(s: int, d: int, form: Literal['w', 'u']) -> dict[str, int]:
    """Half-degrees of the two SOS multipliers of the pair constraint."""
    if form == 'w':
        if s % 2:
            return {'h1': (s + 2 * d - 1) // 2}
        return {'h2': s // 2 + d, 'h3': s // 2 + d - 1}
    total = s // 2 + d
    if total % 2 == 0:
        return {'h2': total // 2, 'h3': total // 2 - 1}
    return {'h4': (total - 1) // 2}


def _resolve_pair_form(s: int, pair_form: PairForm) -> Literal['w', 'u']:
    if pair_form == 'auto':
        return 'w' if s % 2 else 'u'
    if pair_form == 'u' and s % 2:
        msg = f'The u form of the pair constraint needs even s, got s={s}'
        raise DegreeError(msg)
    return pair_form


def lukacs_pair_constraint(
    q2: PolyForm,
    s: int,
    d: int,
    U: Scalar | float,
    pair_form: PairForm = 'auto',
) -> SosIdentity:
    """Exact SOS model of (2 - 2u)^(s/2) q2(u) <= 1 on [-1, U].

    With the w form (w = sqrt(2 - 2u), valid for every s), on [sqrt(2 - 2U), 2]:
    1 - w^s q2(1 - w^2/2) = (w - sqrt(2 - 2U)) s1 + (2 - w) s2 with deg s1 = deg s2 = 2 h1 for odd s,
    and s1 + (w - sqrt(2 - 2U))(2 - w) s2 with deg s1 = s + 2d for even s.
    With the u form (even s), on [-1, U]:
    1 - (2 - 2u)^(s/2) q2(u) = s1 + (u + 1)(U - u) s2 when s/2 + d is even,
    and (u + 1) s1 + (U - u) s2 otherwise.

    The identity is written as target + terms = 0 with
    target = (2 - 2u)^(s/2) q2 - 1.
    """
    if q2.nvars != 1:
        msg = f'The pair polynomial has one variable, got {q2.nvars}'
        raise VariableCountError(msg)
    if s < 1:
        msg = f'Riesz exponent must be positive, got {s}'
        raise DegreeError(msg)
    form = _resolve_pair_form(s, pair_form)
    bits = q2.precision_bits
    ctx = scalar_context(bits)
    one = SparsePoly.constant(1, 1, bits)
    x = SparsePoly.variable(0, 1, bits)
    degrees = lukacs_degrees(s, d, form)
    if form == 'w':
        substituted = q2.map(lambda poly: poly.substitute(0, one - (x * x).scale(ctx.mpf(1) / 2)))
        target = substituted.times(x**s) + PolyForm(1, -one)
        lower = ctx.sqrt(2 - 2 * ctx.convert(U))
        if 'h1' in degrees:
            multipliers = [(x - lower, degrees['h1']), (2 - x, degrees['h1'])]
        else:
            multipliers = [(one, degrees['h2']), ((x - lower) * (2 - x), degrees['h3'])]
    else:
        target = q2.times((2 - x.scale(2)) ** (s // 2)) + PolyForm(1, -one)
        upper = (x + 1) * (SparsePoly.constant(U, 1, bits) - x)
        if 'h2' in degrees:
            multipliers = [(one, degrees['h2']), (upper, degrees['h3'])]
        else:
            multipliers = [(x + 1, degrees['h4']), (SparsePoly.constant(U, 1, bits) - x, degrees['h4'])]
    terms = [
        _plain_term(f'Q2.{k + 1}', generator, h) for k, (generator, h) in enumerate(multipliers) if h >= 0
    ]
    logger.debug('Pair constraint in %s form with degrees %s', form, degrees)
    return SosIdentity(name='pair', target=target, terms=terms)


def _generator_orbits(group: PermGroup, generators: Sequence[Generator]) -> list[list[tuple[Generator, Perm]]]:
    """Partition generators into orbits under the group, with a transport from the first member to each."""
    remaining = list(generators)
    orbits = []
    while remaining:
        representative = remaining.pop(0)
        members = [(representative, group.elements[0])]
        images: list[tuple[SparsePoly, Perm]] = []
        for element in group.elements:
            image = act_on_poly(element, representative.poly)
            if not any(image.is_close(seen) for seen, _ in images):
                images.append((image, element))
        for image, element in images[1:]:
            match = next((g for g in remaining if g.poly.is_close(image)), None)
            if match is None:
                msg = f'Generator set is not closed under the group: image of {representative.name} is missing'
                raise GroupError(msg)
            remaining.remove(match)
            members.append((match, element))
        orbits.append(members)
    return orbits


def _symmetric_terms(
    prefix: str,
    group: PermGroup,
    orbit: Sequence[tuple[Generator, Perm]],
    h: int,
) -> list[SosTerm]:
    representative = orbit[0][0].poly
    bits = representative.precision_bits
    local = stabilizer(group, representative)
    irreps = group_irreps(local, bits)
    basis = projection_basis(local, irreps, h, bits)
    transports = [perm for _, perm in orbit]
    terms = []
    for name, matrix in modified_zonal(basis).items():
        size = len(matrix)
        if not size:
            continue
        kernel = {(r, c): matrix[r][c] for r in range(size) for c in range(r, size)}
        terms.append(
            SosTerm(
                block=BlockSpec(name=f'{prefix}.{name}', size=size),
                generator=representative,
                transports=transports,
                kernel=kernel,
            )
        )
    return terms


def _half_degree(delta: int, generator_degree: float) -> int:
    return math.floor((delta - generator_degree) / 2)


def putinar_identity(
    i: int,
    q: PolyForm,
    delta: int,
    U: Scalar | float,
    *,
    symmetry: bool = True,
    pin_excess: bool = False,
) -> SosIdentity:
    """Degree-delta Putinar model of q <= 0 on P_i.

    Emits q + s_0 + sum over inequality generators g of g s_g (+ det E(u) times
    a sign-split free polynomial of degree delta - 6 for i = 4) = 0. With
    symmetry on, generators are grouped in orbits of the edge group; each
    orbit shares one family of stabilizer-isotypic blocks.

    Raises:
        DegreeError: If deg q exceeds delta and ``pin_excess`` is not set

    """
    if q.nvars != edge_count(i):
        msg = f'q_{i} must be in {edge_count(i)} variables, got {q.nvars}'
        raise VariableCountError(msg)
    if q.degree() > delta:
        if not pin_excess:
            msg = f'deg q_{i} = {q.degree()} exceeds the SOS degree {delta}'
            raise DegreeError(msg)
        logger.warning('deg q_%d = %s exceeds delta = %d; coefficients above delta are pinned to zero', i, q.degree(), delta)
    bits = q.precision_bits
    semialgebraic = build_P(i, U, bits)
    group = edge_action_image(i)
    one = Generator(name='one', family='edge', poly=SparsePoly.constant(1, edge_count(i), bits))
    terms: list[SosTerm] = []
    families: list[tuple[str, list[Generator]]] = [('0', [one])]
    for family in ('edge', 'minor2', 'minor3'):
        families.append((family, [g for g in semialgebraic.inequalities if g.family == family]))
    for family, generators in families:
        h = _half_degree(delta, generators[0].poly.degree())
        if h < 0:
            continue
        if symmetry:
            for index, orbit in enumerate(_generator_orbits(group, generators)):
                terms.extend(_symmetric_terms(f'Q{i}.{family}.{index}', group, orbit, h))
        else:
            terms.extend(_plain_term(f'Q{i}.{g.name}', g.poly, h) for g in generators)
    free_terms = []
    for equality in semialgebraic.equalities:
        free_degree = delta - DET_MULTIPLIER_DEGREE_GAP
        if free_degree >= 0:
            free_terms.append(
                FreeTerm(
                    generator=equality.poly,
                    monomials=monomials_up_to(edge_count(i), free_degree),
                    prefix=f'q{i}det',
                )
            )
    return SosIdentity(name=f'putinar{i}', target=q, terms=terms, free_terms=free_terms)


#: Generator families of the Putinar identities with the degree of their generators.
SOS_FAMILIES: dict[str, int] = {'Q': 0, 'minor2': 2, 'minor3': 3, 'edge': 1}


def _family_representatives(i: int, precision_bits: int) -> dict[str, SparsePoly]:
    representatives = {'Q': SparsePoly.constant(1, edge_count(i), precision_bits)}
    semialgebraic = build_P(i, 0.5, precision_bits)
    for family in ('minor2', 'minor3', 'edge'):
        representatives[family] = next(g.poly for g in semialgebraic.inequalities if g.family == family)
    return representatives


def family_molien_tables(i: int, max_delta: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> dict[str, MolienTable]:
    """Molien tables of the stabilizer of one representative per generator family.

    Each table covers the half-degrees needed for SOS degrees up to ``max_delta``.
    """
    group = edge_action_image(i)
    tables = {}
    for family, poly in _family_representatives(i, precision_bits).items():
        local = stabilizer(group, poly)
        h = max(_half_degree(max_delta, SOS_FAMILIES[family]), 0)
        tables[family] = molien(local, group_irreps(local, precision_bits), h, precision_bits)
        logger.debug('Stabilizer of the %s generator has order %d', family, local.order)
    return tables


def symmetric_block_sizes(tables: Mapping[str, MolienTable], delta: int) -> dict[str, dict[str, int]]:
    """Per family, the size of every nonzero isotypic block at SOS degree ``delta``."""
    sizes: dict[str, dict[str, int]] = {}
    for family, table in tables.items():
        h = _half_degree(delta, SOS_FAMILIES[family])
        sizes[family] = {} if h < 0 else {name: size for name, size in table.block_sizes(h).items() if size}
    return sizes


def sos_block_sizes(i: int, delta: int, *, symmetry: bool, precision_bits: int = DEFAULT_PRECISION_BITS) -> dict[str, list[int]]:
    """Block sizes of the SOS multipliers of one representative per generator family.

    Keys are ``Q`` (constant generator), ``minor2``, ``minor3`` and ``edge``.
    Without symmetry each list holds the single monomial-basis size; with
    symmetry it holds the cumulative Molien multiplicity of every stabilizer
    irrep (zero sizes omitted).
    """
    if symmetry:
        blocks = symmetric_block_sizes(family_molien_tables(i, delta, precision_bits), delta)
        return {family: list(sizes.values()) for family, sizes in blocks.items()}
    nvars = edge_count(i)
    sizes: dict[str, list[int]] = {}
    for family, generator_degree in SOS_FAMILIES.items():
        h = _half_degree(delta, generator_degree)
        sizes[family] = [math.comb(nvars + h, h)] if h >= 0 else []
    return sizes
