"""Assembly of the two-point-kernel program for lower bounds on Riesz energy, and constraint pruning.

The program maximizes sum_i C(N, i) a_i over

    q_0 <= 0, q_1 <= 0,
    (2 - 2u)^(s/2) q_2(u) <= 1 on [-1, U],
    q_i <= 0 on P_i for i = 3, 4,

where q_i = a_i + A_2 K restricted to independent i-sets and written in edge
inner products, and K is a combination of zonal blocks with PSD coefficient
matrices F. Every variable lives in one block of a block-diagonal PSD matrix;
nonnegative scalars share a single diagonal block emitted last.
"""

from __future__ import annotations

import logging
import math
import time
from functools import cached_property
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, model_validator

from rieszbound.domain.exceptions import InconsistentConstraintError, SdpaFormatError, ThresholdError
from rieszbound.domain.invariants import InnerProductRewriter, a2_inner_product_form, edge_count
from rieszbound.domain.polycore import DEFAULT_PRECISION_BITS, SparsePoly, scalar_context
from rieszbound.domain.sosmodel import (
    PolyForm,
    SosIdentity,
    VarKey,
    assemble_identity_rows,
    lukacs_pair_constraint,
    putinar_identity,
)
from rieszbound.domain.subsetspace import zonal_blocks

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from rieszbound.domain.polycore import Scalar
    from rieszbound.domain.sosmodel import PairForm
    from rieszbound.domain.subsetspace import ZonalBlockSet

logger = logging.getLogger(__name__)

DEFAULT_M_BOUND = 1000
#: Above this many rows the rank test runs on a float64 copy.
SHADOW_ROW_LIMIT = 10_000
SHADOW_RANK_FLOOR = 1e-10
MAX_LEVEL = 4
SCALAR_BLOCK = 'scalars'


class SdpBlock(BaseModel):
    """One diagonal block of the matrix variable."""

    model_config = ConfigDict(frozen=True)

    name: str
    size: int = Field(..., ge=1)
    kind: Literal['psd', 'diagonal'] = 'psd'


class ConstraintRow(BaseModel):
    """sum over keys of coefficients[key] * var[key] = rhs.

    Off-diagonal keys (row < col) stand for one variable Y[row][col] = Y[col][row].
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: str
    coefficients: dict[VarKey, Any]
    rhs: Any

    def left_side(self) -> tuple[tuple[VarKey, Any], ...]:
        """Coefficients in key order, used to detect repeated rows."""
        return tuple(sorted(self.coefficients.items()))


class SdpProblem(BaseModel):
    """Block-structured program: maximize objective . Y subject to the rows, Y PSD."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    blocks: list[SdpBlock] = Field(..., description='PSD blocks in emission order; the scalar block comes last')
    scalars: list[str] = Field(default_factory=list, description='Nonnegative scalars, in diagonal order')
    objective: dict[VarKey, Any] = Field(default_factory=dict)
    rows: list[ConstraintRow] = Field(default_factory=list)
    precision_bits: int = DEFAULT_PRECISION_BITS
    metadata: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode='after')
    def validate_entries(self) -> SdpProblem:
        """Every cited entry lies inside its block, upper triangle only."""
        sizes = {block.name: block.size for block in self.blocks}
        scalar_names = set(self.scalars)
        for source in (self.objective, *(row.coefficients for row in self.rows)):
            for key in source:
                if key.block in scalar_names:
                    continue
                size = sizes.get(key.block)
                if size is None or not 0 <= key.row <= key.col < size:
                    msg = f'Entry {key} lies outside the declared blocks'
                    raise SdpaFormatError(msg)
        return self

    @property
    def constraint_count(self) -> int:
        """Number of linear constraints."""
        return len(self.rows)

    def block_layout(self) -> list[SdpBlock]:
        """Blocks as emitted, with the scalar diagonal block appended when present."""
        layout = list(self.blocks)
        if self.scalars:
            layout.append(SdpBlock(name=SCALAR_BLOCK, size=len(self.scalars), kind='diagonal'))
        return layout

    @property
    def block_struct(self) -> list[int]:
        """Signed block sizes as written to SDPA files; diagonal blocks are negative."""
        return [-block.size if block.kind == 'diagonal' else block.size for block in self.block_layout()]

    @cached_property
    def block_numbers(self) -> dict[str, int]:
        """One-based number of every PSD block."""
        return {block.name: k for k, block in enumerate(self.blocks, start=1)}

    @cached_property
    def scalar_positions(self) -> dict[str, int]:
        """One-based diagonal position of every scalar."""
        return {name: k for k, name in enumerate(self.scalars, start=1)}

    def locate(self, key: VarKey) -> tuple[int, int, int]:
        """One-based (block, row, col) position of a variable in the emitted layout.

        Raises:
            KeyError: If the variable belongs to no block

        """
        position = self.scalar_positions.get(key.block)
        if position is not None:
            return len(self.blocks) + 1, position, position
        return self.block_numbers[key.block], key.row + 1, key.col + 1

    def with_rows(self, rows: list[ConstraintRow]) -> SdpProblem:
        """Copy with a replaced row list."""
        return self.model_copy(update={'rows': rows})


def derive_threshold_U(s: int, B: object, precision_bits: int = DEFAULT_PRECISION_BITS) -> Scalar:
    """Inner-product threshold U = 1 - B^(-2/s)/2 of the packing graph for an energy upper bound B.

    Two points closer than (1/B)^(1/s) cannot both be in a configuration of
    energy at most B, so they are adjacent exactly when their inner product
    exceeds U.

    Raises:
        ThresholdError: If B is not positive or U falls outside (-1, 1)

    """
    ctx = scalar_context(precision_bits)
    bound = ctx.convert(B)
    if bound <= 0:
        msg = f'Energy upper bound must be positive, got {B}'
        raise ThresholdError(msg)
    U = 1 - ctx.power(bound, ctx.mpf(-2) / s) / 2
    if not -1 < U < 1:
        msg = f'Threshold U={ctx.nstr(U, 10)} from B={B}, s={s} lies outside (-1, 1)'
        raise ThresholdError(msg)
    return U


def _free_scalars(level: int) -> tuple[str, str]:
    return f'a{level}+', f'a{level}-'


def _kernel_forms(
    blocks: Sequence[ZonalBlockSet],
    d: int,
    precision_bits: int,
    epsilon_shift: int,
) -> list[PolyForm]:
    """q_i - a_i for i = 0..4: the A_2-applied kernel as a form in the entries of every F block."""
    rewriters = {i: InnerProductRewriter(i, d, precision_bits, epsilon_shift) for i in range(2, MAX_LEVEL + 1)}
    forms = []
    for level in range(MAX_LEVEL + 1):
        nvars = edge_count(level) if level >= 2 else 0
        items = []
        for block in blocks:
            for (a, b) in block.entries:
                if a > b:
                    continue
                coefficient = a2_inner_product_form(block, a, b, level, rewriters.get(level))
                items.append((VarKey(f'F{block.label.name}', a, b), coefficient.scale(2) if a != b else coefficient))
        forms.append(PolyForm.accumulate(nvars, items, SparsePoly.zero(nvars, precision_bits)))
        logger.debug('Kernel form for i=%d has %d variables', level, len(forms[-1].parts))
    return forms


def _identity_rows(identity: SosIdentity) -> list[ConstraintRow]:
    return [
        ConstraintRow(label=f'{identity.name}:{"".join(map(str, row.monomial)) or "1"}', coefficients=row.coefficients, rhs=-row.constant)
        for row in assemble_identity_rows(identity)
    ]


def assemble_E2(
    N: int,
    s: int,
    d: int,
    delta: int,
    U: object,
    *,
    symmetry: bool = True,
    M_bound: float = DEFAULT_M_BOUND,
    pair_form: PairForm = 'auto',
    precision_bits: int = DEFAULT_PRECISION_BITS,
    epsilon_shift: int = 0,
) -> SdpProblem:
    """Assemble the full program for N points, Riesz exponent s, kernel degree d and SOS degree delta.

    Args:
        N: Number of points
        s: Riesz exponent
        d: Truncation degree of the zonal blocks
        delta: Degree of the Putinar certificates for i = 3, 4
        U: Inner-product threshold of the packing graph
        symmetry: Use symmetry-adapted SOS blocks
        M_bound: Bound on each half of a split free variable
        pair_form: Substitution used for the pair constraint
        precision_bits: Working precision
        epsilon_shift: Regularization offset of the inner-product rewrite, in bits

    Returns:
        The unpruned program

    """
    started = time.perf_counter()
    ctx = scalar_context(precision_bits)
    threshold = ctx.convert(U)
    zonal = zonal_blocks(d, precision_bits=precision_bits)
    kernel_forms = _kernel_forms(zonal, d, precision_bits, epsilon_shift)
    logger.info('Applied A_2 to %d zonal blocks in %.2fs', len(zonal), time.perf_counter() - started)

    scalars: list[str] = []
    rows: list[ConstraintRow] = []
    q_forms = []
    for level, form in enumerate(kernel_forms):
        plus, minus = _free_scalars(level)
        scalars += [plus, minus]
        one = SparsePoly.constant(1, form.nvars, precision_bits)
        free = PolyForm(form.nvars, SparsePoly.zero(form.nvars, precision_bits), {VarKey(plus): one, VarKey(minus): -one})
        q_forms.append(form + free)

    for level in range(MAX_LEVEL + 1):
        for name in _free_scalars(level):
            slack = f'{name}.slack'
            scalars.append(slack)
            rows.append(
                ConstraintRow(label=f'bound:{name}', coefficients={VarKey(name): ctx.one, VarKey(slack): ctx.one}, rhs=ctx.convert(M_bound))
            )

    for level in (0, 1):
        slack = f'q{level}.slack'
        scalars.append(slack)
        q = q_forms[level]
        coefficients = {key: poly.coefficient(()) for key, poly in q.parts.items()}
        coefficients[VarKey(slack)] = ctx.one
        rows.append(ConstraintRow(label=f'q{level}', coefficients=coefficients, rhs=-q.constant.coefficient(())))

    identities = [lukacs_pair_constraint(q_forms[2], s, d, threshold, pair_form)]
    identities += [
        putinar_identity(level, q_forms[level], delta, threshold, symmetry=symmetry, pin_excess=True) for level in (3, 4)
    ]
    sos_blocks = []
    for identity in identities:
        sos_blocks += identity.blocks()
        scalars += identity.scalars()
        rows += _identity_rows(identity)

    blocks = [SdpBlock(name=f'F{block.label.name}', size=block.size) for block in zonal]
    blocks += [SdpBlock(name=block.name, size=block.size) for block in sos_blocks]
    objective: dict[VarKey, Any] = {}
    for level in range(MAX_LEVEL + 1):
        plus, minus = _free_scalars(level)
        weight = ctx.mpf(math.comb(N, level))
        if weight:
            objective[VarKey(plus)] = weight
            objective[VarKey(minus)] = -weight
    problem = SdpProblem(
        blocks=blocks,
        scalars=scalars,
        objective=objective,
        rows=rows,
        precision_bits=precision_bits,
        metadata={'N': N, 's': s, 'd': d, 'delta': delta, 'U': ctx.nstr(threshold, 30), 'symmetry': symmetry},
    )
    logger.info(
        'Assembled program: %d blocks, %d scalars, %d rows in %.2fs',
        len(blocks),
        len(scalars),
        len(rows),
        time.perf_counter() - started,
    )
    return problem


def remove_duplicate_rows(rows: Iterable[ConstraintRow]) -> list[ConstraintRow]:
    """Keep the first of every group of rows with identical left sides.

    Raises:
        InconsistentConstraintError: If two rows share a left side but not a right side

    """
    seen: dict[tuple[tuple[VarKey, Any], ...], ConstraintRow] = {}
    kept = []
    for row in rows:
        left = row.left_side()
        earlier = seen.get(left)
        if earlier is None:
            seen[left] = row
            kept.append(row)
        elif earlier.rhs != row.rhs:
            msg = f'Rows {earlier.label} and {row.label} have the same left side but right sides {earlier.rhs} and {row.rhs}'
            raise InconsistentConstraintError(msg)
    return kept


def _independent_rows_exact(rows: Sequence[ConstraintRow], precision_bits: int) -> list[int]:
    """Modified Gram-Schmidt over sparse rows at working precision.

    The right side rides along as an extra coordinate, so a dependent row whose
    right side disagrees with the rows it depends on is caught.

    Raises:
        InconsistentConstraintError: If a dependent row contradicts the kept rows

    """
    ctx = scalar_context(precision_bits)
    norm = ctx.sqrt(ctx.fsum(v * v for row in rows for v in row.coefficients.values()))
    threshold = ctx.ldexp(norm, -(precision_bits // 4))
    basis: list[tuple[dict[VarKey, Scalar], Scalar]] = []
    kept = []
    for index, row in enumerate(rows):
        residual = dict(row.coefficients)
        rhs = ctx.mpf(row.rhs)
        for vector, vector_rhs in basis:
            small, large = (vector, residual) if len(vector) < len(residual) else (residual, vector)
            overlap = ctx.fsum(value * large[key] for key, value in small.items() if key in large)
            if overlap:
                for key, value in vector.items():
                    residual[key] = residual.get(key, ctx.zero) - overlap * value
                rhs -= overlap * vector_rhs
        length = ctx.sqrt(ctx.fsum(v * v for v in residual.values()))
        if length > threshold:
            basis.append(({key: value / length for key, value in residual.items() if value}, rhs / length))
            kept.append(index)
        elif abs(rhs) > threshold:
            msg = f'Row {row.label} depends on earlier rows but its right side is off by {ctx.nstr(rhs, 8)}'
            raise InconsistentConstraintError(msg)
    return kept


def _independent_rows_shadow(rows: Sequence[ConstraintRow], precision_bits: int) -> list[int]:
    """Column-pivoted QR of the transposed float64 constraint matrix.

    Raises:
        InconsistentConstraintError: If a dropped row's right side disagrees with
            the least-squares combination of the kept rows

    """
    columns = sorted({key for row in rows for key in row.coefficients})
    position = {key: k for k, key in enumerate(columns)}
    matrix = np.zeros((len(columns), len(rows)))
    for index, row in enumerate(rows):
        for key, value in row.coefficients.items():
            matrix[position[key], index] = float(value)
    rhs = np.array([float(row.rhs) for row in rows])
    threshold = max(2.0 ** (-(precision_bits // 4)), SHADOW_RANK_FLOOR) * np.linalg.norm(matrix)
    if matrix.size:
        _, r, pivots = scipy.linalg.qr(matrix, mode='economic', pivoting=True)
        rank = int(np.count_nonzero(np.abs(np.diag(r)) > threshold))
        kept = sorted(int(k) for k in pivots[:rank])
    else:
        kept = []
    dropped = sorted(set(range(len(rows))) - set(kept))
    if dropped:
        if kept:
            weights = np.linalg.lstsq(matrix[:, kept], matrix[:, dropped], rcond=None)[0]
            mismatch = rhs[dropped] - rhs[kept] @ weights
        else:
            mismatch = rhs[dropped]
        worst = int(np.argmax(np.abs(mismatch)))
        if abs(mismatch[worst]) > threshold:
            msg = f'Row {rows[dropped[worst]].label} depends on other rows but its right side is off by {mismatch[worst]:.3g}'
            raise InconsistentConstraintError(msg)
    return kept


def prune_constraints(problem: SdpProblem) -> SdpProblem:
    """Drop repeated rows, then keep a maximal linearly independent subset in the original order."""
    started = time.perf_counter()
    unique = remove_duplicate_rows(problem.rows)
    if len(unique) > SHADOW_ROW_LIMIT:
        kept = _independent_rows_shadow(unique, problem.precision_bits)
    else:
        kept = _independent_rows_exact(unique, problem.precision_bits)
    rows = [unique[k] for k in kept]
    logger.info(
        'Pruned %d rows to %d (%d repeated, %d dependent) in %.2fs',
        len(problem.rows),
        len(rows),
        len(problem.rows) - len(unique),
        len(unique) - len(rows),
        time.perf_counter() - started,
    )
    return problem.with_rows(rows)
