"""Riesz energies of explicit point configurations on the unit sphere."""

from __future__ import annotations

import itertools
import logging
from typing import TYPE_CHECKING, Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from rieszbound.domain.exceptions import DegreeError, VariableCountError
from rieszbound.domain.polycore import DEFAULT_PRECISION_BITS, dot, scalar_context

if TYPE_CHECKING:
    from collections.abc import Sequence

    from rieszbound.domain.polycore import Scalar

logger = logging.getLogger(__name__)

Point = tuple[Any, Any, Any]

GOLDEN_TOLERANCE = 1e-20
#: Base heights searched for the square pyramid; both ends collide points.
SQUARE_PYRAMID_BRACKET = (-0.999, 0.999)


def _check_exponent(s: float) -> None:
    if s <= 0:
        msg = f'Riesz exponent must be positive, got {s}'
        raise DegreeError(msg)


def riesz_potential(x: Sequence[Scalar], y: Sequence[Scalar], s: Scalar) -> Scalar:
    """|x - y|^(-s)."""
    squared = sum(((a - b) ** 2 for a, b in zip(x, y, strict=True)), start=0)
    return squared ** (-s / 2)


def potential_matrix(points: Sequence[Point], s: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> list[list[Scalar]]:
    """Symmetric matrix of pairwise potentials; the diagonal is zero."""
    ctx = scalar_context(precision_bits)
    n = len(points)
    matrix = [[ctx.zero] * n for _ in range(n)]
    for k, kp in itertools.combinations(range(n), 2):
        value = riesz_potential(points[k], points[kp], ctx.mpf(s))
        matrix[k][kp] = matrix[kp][k] = value
    return matrix


def riesz_energy(points: Sequence[Point], s: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> Scalar:
    """Sum over pairs of |x_i - x_j|^(-s)."""
    ctx = scalar_context(precision_bits)
    return ctx.fsum(
        riesz_potential(points[k], points[kp], ctx.mpf(s)) for k, kp in itertools.combinations(range(len(points)), 2)
    )


class ConfigurationEnergy(BaseModel):
    """An explicit configuration of distinct unit vectors and its Riesz s-energy."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    points: list[Point]
    s: int = Field(..., ge=1, description='Riesz exponent')
    energy: Any = Field(..., description='Riesz s-energy at working precision')
    precision_bits: int = DEFAULT_PRECISION_BITS

    @model_validator(mode='after')
    def validate_points(self) -> ConfigurationEnergy:
        """Points are unit vectors and pairwise distinct."""
        ctx = scalar_context(self.precision_bits)
        tolerance = max(ctx.mpf('1e-30'), ctx.ldexp(1, -(self.precision_bits // 2)))
        for point in self.points:
            if abs(dot(point, point) - 1) > tolerance:
                msg = f'Point {point} is not on the unit sphere'
                raise VariableCountError(msg)
        for x, y in itertools.combinations(self.points, 2):
            if all(abs(a - b) <= tolerance for a, b in zip(x, y, strict=True)):
                msg = f'Configuration repeats the point {x}'
                raise VariableCountError(msg)
        return self

    @classmethod
    def of(cls, points: Sequence[Point], s: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> ConfigurationEnergy:
        """Compute the energy of a configuration."""
        return cls(points=list(points), s=s, energy=riesz_energy(points, s, precision_bits), precision_bits=precision_bits)


def bipyramid_points(precision_bits: int = DEFAULT_PRECISION_BITS) -> list[Point]:
    """Two poles and an equilateral triangle on the equator."""
    ctx = scalar_context(precision_bits)
    half = ctx.mpf(1) / 2
    root = ctx.sqrt(3) / 2
    return [
        (ctx.zero, ctx.zero, ctx.one),
        (ctx.zero, ctx.zero, -ctx.one),
        (ctx.one, ctx.zero, ctx.zero),
        (-half, root, ctx.zero),
        (-half, -root, ctx.zero),
    ]


def energy_bipyramid(s: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> Scalar:
    """Riesz s-energy of the triangular bipyramid: 6/2^(s/2) + 3/3^(s/2) + 1/4^(s/2).

    Raises:
        DegreeError: If s is not positive

    """
    _check_exponent(s)
    ctx = scalar_context(precision_bits)
    half = ctx.mpf(s) / 2
    return 6 / ctx.power(2, half) + 3 / ctx.power(3, half) + 1 / ctx.power(4, half)


def square_pyramid_points(z: object, precision_bits: int = DEFAULT_PRECISION_BITS) -> list[Point]:
    """North pole plus a square at height z."""
    ctx = scalar_context(precision_bits)
    height = ctx.convert(z)
    if not -1 < height < 1:
        msg = f'Base height must lie in (-1, 1), got {z}'
        raise VariableCountError(msg)
    r = ctx.sqrt(1 - height * height)
    return [
        (ctx.zero, ctx.zero, ctx.one),
        (r, ctx.zero, height),
        (ctx.zero, r, height),
        (-r, ctx.zero, height),
        (ctx.zero, -r, height),
    ]


def energy_square_pyramid(s: int, z: object, precision_bits: int = DEFAULT_PRECISION_BITS) -> Scalar:
    """Riesz s-energy of the square pyramid with base at height z."""
    _check_exponent(s)
    return riesz_energy(square_pyramid_points(z, precision_bits), s, precision_bits)


def optimize_square_pyramid(
    s: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    tolerance: float = GOLDEN_TOLERANCE,
) -> tuple[Scalar, Scalar]:
    """Golden-section search for the base height minimizing the square pyramid's energy.

    Returns:
        (z, energy) at the located minimum

    """
    _check_exponent(s)
    ctx = scalar_context(precision_bits)
    ratio = (ctx.sqrt(5) - 1) / 2
    low, high = (ctx.mpf(end) for end in SQUARE_PYRAMID_BRACKET)
    left = high - ratio * (high - low)
    right = low + ratio * (high - low)
    f_left = energy_square_pyramid(s, left, precision_bits)
    f_right = energy_square_pyramid(s, right, precision_bits)
    iterations = 0
    while high - low > tolerance:
        iterations += 1
        if f_left < f_right:
            high, right, f_right = right, left, f_left
            left = high - ratio * (high - low)
            f_left = energy_square_pyramid(s, left, precision_bits)
        else:
            low, left, f_left = left, right, f_right
            right = low + ratio * (high - low)
            f_right = energy_square_pyramid(s, right, precision_bits)
    z = (low + high) / 2
    energy = energy_square_pyramid(s, z, precision_bits)
    logger.debug('Square pyramid for s=%d: z=%s after %d steps', s, ctx.nstr(z, 12), iterations)
    return z, energy
