"""Symmetry-adapted functions on subsets of at most two points of the sphere.

A subset of cardinality i is written with 3i coordinate slots (x1, y1, z1,
x2, ...). Pair functions are symmetric in their two points, so any ordering of
a subset's points gives the same value.
"""

from __future__ import annotations

import functools
import itertools
import logging
import time
from typing import TYPE_CHECKING, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from rieszbound.domain.exceptions import IndexAdmissibilityError, SubsetSizeError
from rieszbound.domain.harmonics import IrrepLabel, phi_inverse_expand, spherical_harmonic_cartesian
from rieszbound.domain.polycore import DEFAULT_PRECISION_BITS, SparsePoly, scalar_context

if TYPE_CHECKING:
    from collections.abc import Mapping

logger = logging.getLogger(__name__)

MAX_SUBSET_SIZE = 4

Subset = tuple[int, ...]


class TauIndex(BaseModel):
    """Index of an isotypic copy: the empty set, one harmonic, or a coupled pair."""

    model_config = ConfigDict(frozen=True)

    kind: Literal['empty', 'single', 'pair']
    l1: int = Field(default=0, ge=0, description='Degree of the single harmonic, or the smaller pair degree')
    l2: int = Field(default=0, ge=0, description='Larger pair degree')

    @model_validator(mode='after')
    def validate_degrees(self) -> TauIndex:
        """Pairs are stored with l1 <= l2; other kinds carry no l2."""
        if self.kind == 'pair' and self.l1 > self.l2:
            msg = f'Pair degrees must satisfy l1 <= l2, got ({self.l1}, {self.l2})'
            raise ValueError(msg)
        if self.kind == 'empty' and (self.l1 or self.l2):
            msg = 'The empty index carries no degrees'
            raise ValueError(msg)
        if self.kind == 'single' and self.l2:
            msg = 'A single index carries no second degree'
            raise ValueError(msg)
        return self

    @property
    def cardinality(self) -> int:
        """Number of points of the subsets this index lives on."""
        return {'empty': 0, 'single': 1, 'pair': 2}[self.kind]

    @property
    def weight(self) -> int:
        """Total harmonic degree: 0, l1 or l1 + l2."""
        return {'empty': 0, 'single': self.l1, 'pair': self.l1 + self.l2}[self.kind]

    @property
    def name(self) -> str:
        """Short display form."""
        if self.kind == 'empty':
            return 'empty'
        if self.kind == 'single':
            return f'single {self.l1}'
        return f'pair({self.l1},{self.l2})'


def is_admissible(label: IrrepLabel, tau: TauIndex) -> bool:
    """Whether ``tau`` indexes a copy of ``label`` in the function space on subsets."""
    ell, parity = label.ell, label.parity
    if tau.kind == 'empty':
        return ell == 0 and parity == 1
    if tau.kind == 'single':
        return tau.l1 == ell and parity == (-1) ** ell
    gap = tau.l2 - tau.l1
    return (ell % 2) <= gap <= ell <= tau.l1 + tau.l2 and (-1) ** (tau.l1 + tau.l2) == parity


def _tau_sort_key(tau: TauIndex) -> tuple[int, int, int]:
    return (tau.weight, tau.cardinality, tau.l1)


def build_index_set(label: IrrepLabel, d: int) -> list[TauIndex]:
    """All admissible indices of weight at most ``d``, ordered by weight, cardinality, l1."""
    if d < 0:
        msg = f'Truncation degree must be nonnegative, got {d}'
        raise ValueError(msg)
    candidates = [TauIndex(kind='empty')]
    candidates.extend(TauIndex(kind='single', l1=ell) for ell in range(d + 1))
    candidates.extend(
        TauIndex(kind='pair', l1=l1, l2=l2) for l1 in range(d + 1) for l2 in range(l1, d + 1 - l1)
    )
    admitted = [tau for tau in candidates if tau.weight <= d and is_admissible(label, tau)]
    return sorted(admitted, key=_tau_sort_key)


class BasisElement(BaseModel):
    """One function e_{label, tau, m} of the symmetry-adapted system.

    ``components[i]`` is the restriction to subsets of cardinality i, a
    polynomial in 3i variables.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: IrrepLabel
    tau: TauIndex
    m: int
    components: dict[int, SparsePoly]

    def component(self, cardinality: int) -> SparsePoly:
        """Restriction to subsets of the given cardinality."""
        return self.components[cardinality]


def _point_slots(point: int) -> list[int]:
    return [3 * point, 3 * point + 1, 3 * point + 2]


@functools.cache
def basis_element(
    label: IrrepLabel,
    tau: TauIndex,
    m: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> BasisElement:
    """Build e_{label, tau, m}, normalized for the product measure on each stratum.

    Raises:
        IndexAdmissibilityError: If tau is not admissible for label or |m| > ell

    """
    if not is_admissible(label, tau) or abs(m) > label.ell:
        msg = f'{tau.name} with m={m} is not admissible for irrep {label.name}'
        raise IndexAdmissibilityError(msg)
    ctx = scalar_context(precision_bits)
    components = {
        0: SparsePoly.zero(0, precision_bits),
        1: SparsePoly.zero(3, precision_bits),
        2: SparsePoly.zero(6, precision_bits),
    }
    if tau.kind == 'empty':
        components[0] = SparsePoly.constant(1, 0, precision_bits)
    elif tau.kind == 'single':
        components[1] = spherical_harmonic_cartesian(label.ell, m, precision_bits)
    else:
        first, second = _point_slots(0), _point_slots(1)
        coupled = SparsePoly.zero(6, precision_bits)
        for m1, m2, coefficient in phi_inverse_expand(tau.l1, tau.l2, label.ell, m, precision_bits):
            left = spherical_harmonic_cartesian(tau.l1, m1, precision_bits).relabel(first, 6)
            right = spherical_harmonic_cartesian(tau.l2, m2, precision_bits).relabel(second, 6)
            coupled += (left * right).scale(coefficient)
        if tau.l1 == tau.l2:
            components[2] = coupled
        else:
            swapped = coupled.relabel(second + first, 6)
            components[2] = (coupled + swapped).scale(1 / ctx.sqrt(2))
    return BasisElement(label=label, tau=tau, m=m, components=components)


class ZonalBlockSet(BaseModel):
    """Zonal matrix of one irrep restricted to the index set of degree d.

    ``entries[(a, b)]`` is the real polynomial Z(S, S')_{rows[a], rows[b]} in
    3(i + i') variables, with i and i' the cardinalities of the two indices;
    the first 3i variables hold S and the rest hold S'.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: IrrepLabel
    d: int
    rows: list[TauIndex]
    entries: dict[tuple[int, int], SparsePoly]

    @property
    def size(self) -> int:
        """Number of indices."""
        return len(self.rows)

    def cardinalities(self, a: int, b: int) -> tuple[int, int]:
        """Cardinalities of the subsets on which entry (a, b) is supported."""
        return self.rows[a].cardinality, self.rows[b].cardinality

    def kernel(self, a: int, b: int) -> dict[tuple[int, int], SparsePoly]:
        """Entry (a, b) as a kernel keyed by the cardinality pair it lives on."""
        return {self.cardinalities(a, b): self.entries[a, b]}


def zonal_entry(label: IrrepLabel, tau: TauIndex, tau_prime: TauIndex, precision_bits: int) -> SparsePoly:
    """Sum over m of e_{tau,m}(S) conj(e_{tau',m}(S')), cast to a real polynomial.

    Raises:
        NotRealError: If imaginary parts survive the sum (phase-convention bug)

    """
    i, j = tau.cardinality, tau_prime.cardinality
    nvars = 3 * (i + j)
    left_slots = list(range(3 * i))
    right_slots = list(range(3 * i, nvars))
    total = SparsePoly.zero(nvars, precision_bits)
    for m in range(-label.ell, label.ell + 1):
        left = basis_element(label, tau, m, precision_bits).component(i).relabel(left_slots, nvars)
        right = basis_element(label, tau_prime, m, precision_bits).component(j).conjugate()
        total += left * right.relabel(right_slots, nvars)
    return total.to_real()


def irrep_labels(ell_max: int) -> list[IrrepLabel]:
    """Labels (ell, p) for ell <= ell_max, parity +1 before -1."""
    return [IrrepLabel(ell=ell, parity=parity) for ell in range(ell_max + 1) for parity in (1, -1)]


def zonal_blocks(
    d: int,
    ell_max: int | None = None,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> list[ZonalBlockSet]:
    """Zonal blocks of every irrep whose truncated index set is nonempty.

    Args:
        d: Truncation degree
        ell_max: Largest irrep degree considered, 2d when omitted
        precision_bits: Working precision

    Returns:
        Block sets ordered by (ell, parity) with +1 first

    """
    started = time.perf_counter()
    limit = 2 * d if ell_max is None else ell_max
    blocks = []
    for label in irrep_labels(limit):
        rows = build_index_set(label, d)
        if not rows:
            continue
        entries: dict[tuple[int, int], SparsePoly] = {}
        for a, b in itertools.combinations_with_replacement(range(len(rows)), 2):
            entry = zonal_entry(label, rows[a], rows[b], precision_bits)
            entries[a, b] = entry
            if a != b:
                i, j = rows[a].cardinality, rows[b].cardinality
                # Z(S, S')_{ab} = Z(S', S)_{ba}: move the S' slots to the front
                swap = [3 * j + k if k < 3 * i else k - 3 * i for k in range(3 * (i + j))]
                entries[b, a] = entry.relabel(swap, 3 * (i + j))
        blocks.append(ZonalBlockSet(label=label, d=d, rows=rows, entries=entries))
        logger.debug('Zonal block %s: %d indices', label.name, len(rows))
    logger.info('Built %d zonal blocks for d=%d in %.2fs', len(blocks), d, time.perf_counter() - started)
    return blocks


def subset_pairs(size: int) -> list[tuple[Subset, Subset]]:
    """Ordered pairs (J, J') of subsets of {0..size-1} with |J|, |J'| <= 2 and union everything.

    Raises:
        SubsetSizeError: If size is negative or exceeds 4

    """
    if not 0 <= size <= MAX_SUBSET_SIZE:
        msg = f'Subsets of size {size} are outside the second level of the hierarchy'
        raise SubsetSizeError(msg)
    points = range(size)
    small = [c for k in range(3) for c in itertools.combinations(points, k)]
    everything = set(points)
    return [(j, k) for j in small for k in small if set(j) | set(k) == everything]


def apply_A2(
    kernel: Mapping[tuple[int, int], SparsePoly],
    size: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> SparsePoly:
    """Sum K(J, J') over all pairs of at most two-point subsets covering a set of ``size`` points.

    Args:
        kernel: Polynomials keyed by cardinality pair (|J|, |J'|), each in 3(|J| + |J'|) variables
        size: Cardinality of S
        precision_bits: Working precision

    Returns:
        Polynomial in the 3 * size coordinates of S

    """
    nvars = 3 * size
    total = SparsePoly.zero(nvars, precision_bits)
    for first, second in subset_pairs(size):
        entry = kernel.get((len(first), len(second)))
        if entry is None:
            continue
        slots = [s for point in first + second for s in _point_slots(point)]
        total += entry.relabel(slots, nvars)
    return total
