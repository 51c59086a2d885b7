"""Spherical harmonics in cartesian form and Clebsch-Gordan coupling.

Harmonics are complex homogeneous polynomials in (x, y, z), orthonormal for
the rotation-invariant probability measure on the sphere. Negative orders use
Y_l^{-m} = (-1)^m conj(Y_l^m).
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import TYPE_CHECKING

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from rieszbound.domain.exceptions import CouplingRangeError
from rieszbound.domain.polycore import DEFAULT_PRECISION_BITS, SparsePoly, scalar_context

if TYPE_CHECKING:
    from rieszbound.domain.polycore import Scalar


class IrrepLabel(BaseModel):
    """Irreducible representation of O(3): degree ell and parity under x -> -x."""

    model_config = ConfigDict(frozen=True)

    ell: int = Field(..., ge=0, description='Degree of the harmonics spanning the irrep')
    parity: int = Field(..., description='Eigenvalue of the antipodal map, +1 or -1')

    @field_validator('parity')
    @classmethod
    def validate_parity(cls, v: int) -> int:
        """Parity is a sign."""
        if v not in {1, -1}:
            msg = f'Parity must be +1 or -1, got {v}'
            raise ValueError(msg)
        return v

    @property
    def dim(self) -> int:
        """Dimension 2*ell + 1."""
        return 2 * self.ell + 1

    @property
    def name(self) -> str:
        """Compact display form such as ``(2,+)``."""
        return f'({self.ell},{"+" if self.parity > 0 else "-"})'


class CGKey(BaseModel):
    """Arguments of a Clebsch-Gordan coefficient <l1 m1; l2 m2 | l m>."""

    model_config = ConfigDict(frozen=True)

    l1: int = Field(..., ge=0)
    m1: int
    l2: int = Field(..., ge=0)
    m2: int
    l: int = Field(..., ge=0)  # noqa: E741
    m: int

    @model_validator(mode='after')
    def validate_orders(self) -> CGKey:
        """Each order is bounded by its degree."""
        if abs(self.m1) > self.l1 or abs(self.m2) > self.l2 or abs(self.m) > self.l:
            msg = f'Orders out of range in {self}'
            raise ValueError(msg)
        return self


@functools.cache
def _legendre_coefficients(ell: int) -> tuple[Fraction, ...]:
    """Exact coefficients of P_ell by the Rodrigues formula, lowest degree first."""
    coefficients = [Fraction(0)] * (ell + 1)
    scale = Fraction(1, 2**ell * math.factorial(ell))
    for k in range(ell + 1):
        power = 2 * k
        if power < ell:
            continue
        falling = math.factorial(power) // math.factorial(power - ell)
        coefficients[power - ell] += scale * math.comb(ell, k) * (-1) ** (ell - k) * falling
    return tuple(coefficients)


@functools.cache
def legendre(ell: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> SparsePoly:
    """The Legendre polynomial P_ell as a polynomial in one variable."""
    ctx = scalar_context(precision_bits)
    terms = {(k,): ctx.mpf(c.numerator) / c.denominator for k, c in enumerate(_legendre_coefficients(ell)) if c}
    return SparsePoly(1, terms, precision_bits)


def assoc_legendre_derivative_part(ell: int, m: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> SparsePoly:
    """The m-th derivative of P_ell; the zero polynomial when m > ell."""
    result = legendre(ell, precision_bits)
    for _ in range(m):
        result = result.derivative(0)
    return result


@functools.cache
def spherical_harmonic_cartesian(ell: int, m: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> SparsePoly:
    """Y_ell^m as a homogeneous complex polynomial of degree ell in (x, y, z).

    Raises:
        CouplingRangeError: If |m| > ell

    """
    if abs(m) > ell:
        msg = f'Order {m} exceeds degree {ell}'
        raise CouplingRangeError(msg)
    if m < 0:
        return spherical_harmonic_cartesian(ell, -m, precision_bits).conjugate().scale((-1) ** -m)
    ctx = scalar_context(precision_bits)
    x = SparsePoly.variable(0, 3, precision_bits)
    y = SparsePoly.variable(1, 3, precision_bits)
    z = SparsePoly.variable(2, 3, precision_bits)
    radius_squared = x * x + y * y + z * z
    rising = (x + y.scale(ctx.mpc(0, 1))) ** m
    derivative = assoc_legendre_derivative_part(ell, m, precision_bits)
    body = SparsePoly.zero(3, precision_bits)
    for (power,), coefficient in derivative.items():
        # every term is lifted to degree ell - m by powers of x^2 + y^2 + z^2
        body += (z**power * radius_squared ** ((ell - m - power) // 2)).scale(coefficient)
    norm = ctx.sqrt(ctx.mpf((2 * ell + 1) * math.factorial(ell - m)) / math.factorial(ell + m))
    return (body * rising).scale(norm)


def laplacian(p: SparsePoly) -> SparsePoly:
    """Sum of second partial derivatives over all variables."""
    result = SparsePoly.zero(p.nvars, p.precision_bits)
    for k in range(p.nvars):
        result += p.derivative(k).derivative(k)
    return result


@functools.cache
def _clebsch_gordan_exact(l1: int, m1: int, l2: int, m2: int, l: int, m: int) -> tuple[int, Fraction]:  # noqa: E741
    """Sign and exact square of a Clebsch-Gordan coefficient."""
    if m1 + m2 != m or not abs(l1 - l2) <= l <= l1 + l2:
        return 0, Fraction(0)
    f = math.factorial
    prefactor = Fraction(
        (2 * l + 1) * f(l1 + l2 - l) * f(l1 - l2 + l) * f(-l1 + l2 + l),
        f(l1 + l2 + l + 1),
    ) * (f(l1 + m1) * f(l1 - m1) * f(l2 + m2) * f(l2 - m2) * f(l + m) * f(l - m))
    total = Fraction(0)
    for nu in range(l1 + l2 + l + 1):
        arguments = (nu, l1 + l2 - l - nu, l1 - m1 - nu, l2 + m2 - nu, l - l2 + m1 + nu, l - l1 - m2 + nu)
        if min(arguments) < 0:
            continue
        total += Fraction((-1) ** nu, math.prod(f(a) for a in arguments))
    if total == 0:
        return 0, Fraction(0)
    return (1 if total > 0 else -1), prefactor * total * total


def clebsch_gordan(key: CGKey, precision_bits: int = DEFAULT_PRECISION_BITS) -> Scalar:
    """Evaluate <l1 m1; l2 m2 | l m>; zero outside the selection rules."""
    sign, square = _clebsch_gordan_exact(key.l1, key.m1, key.l2, key.m2, key.l, key.m)
    ctx = scalar_context(precision_bits)
    if not sign:
        return ctx.zero
    return sign * ctx.sqrt(ctx.mpf(square.numerator) / square.denominator)


def phi_inverse_expand(
    l1: int,
    l2: int,
    l: int,  # noqa: E741
    m: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> list[tuple[int, int, Scalar]]:
    """Coefficients expressing the coupled state (l, m) in the product basis Y_l1^m1 Y_l2^m2.

    Returns:
        Triples (m1, m2, coefficient) with m1 + m2 = m and nonzero coefficient, ordered by m1

    Raises:
        CouplingRangeError: If l is outside [|l1 - l2|, l1 + l2] or |m| > l

    """
    if not abs(l1 - l2) <= l <= l1 + l2 or abs(m) > l:
        msg = f'Cannot couple degrees {l1} and {l2} to ({l}, {m})'
        raise CouplingRangeError(msg)
    expansion = []
    for m1 in range(max(-l1, m - l2), min(l1, m + l2) + 1):
        m2 = m - m1
        key = CGKey(l1=l1, m1=m1, l2=l2, m2=m2, l=l, m=m)
        coefficient = clebsch_gordan(key, precision_bits)
        if coefficient:
            expansion.append((m1, m2, coefficient))
    return expansion
