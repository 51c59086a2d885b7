"""Sparse multivariate polynomials over arbitrary-precision scalars.

Scalars are mpmath numbers drawn from one ``MPContext`` per precision, so two
pipelines running at different precisions never share mutable state. A
``SparsePoly`` maps dense exponent tuples to real (``mpf``) or complex
(``mpc``) coefficients and drops anything below the precision's drop tolerance.
"""

from __future__ import annotations

import functools
import math
from typing import TYPE_CHECKING, Any, Final

import mpmath

from rieszbound.domain.exceptions import NotRealError, PrecisionMismatchError, VariableCountError

if TYPE_CHECKING:
    from collections.abc import Iterator, Mapping, Sequence

    import numpy as np

DEFAULT_PRECISION_BITS: Final = 256

#: mpf of a per-precision context. mpmath ships no type information.
Scalar = Any
#: mpc (or mpf when the imaginary part is known to vanish).
CScalar = Any
Exponents = tuple[int, ...]

#: Degree of the zero polynomial.
NEG_INF_DEGREE: Final = -math.inf


@functools.cache
def scalar_context(precision_bits: int = DEFAULT_PRECISION_BITS) -> Any:  # noqa: ANN401
    """Return the mpmath context used for every scalar at ``precision_bits``.

    Contexts are created once and never reconfigured afterwards.

    Raises:
        ValueError: If precision_bits is not positive

    """
    if precision_bits <= 0:
        msg = f'precision_bits must be positive, got {precision_bits}'
        raise ValueError(msg)
    ctx = mpmath.MPContext()
    ctx.prec = precision_bits
    return ctx


def drop_tolerance(precision_bits: int) -> Scalar:
    """Coefficients with |re| and |im| below 2^(16 - precision_bits) are discarded."""
    ctx = scalar_context(precision_bits)
    return ctx.ldexp(ctx.one, 16 - precision_bits)


def check_tolerance(precision_bits: int) -> Scalar:
    """Tolerance 2^(-precision_bits/2) used by identity and realness checks."""
    ctx = scalar_context(precision_bits)
    return ctx.ldexp(ctx.one, -(precision_bits // 2))


def precision_of(value: object) -> int | None:
    """Working precision of an mpmath value, or None for plain Python numbers."""
    context = getattr(value, 'context', None)
    return None if context is None else int(context.prec)


def to_scalar(value: object, precision_bits: int = DEFAULT_PRECISION_BITS) -> CScalar:
    """Convert a Python or mpmath number to a scalar at ``precision_bits``.

    Raises:
        PrecisionMismatchError: If an mpmath value belongs to another precision

    """
    ctx = scalar_context(precision_bits)
    source = precision_of(value)
    if source is not None and source != precision_bits:
        raise PrecisionMismatchError(source, precision_bits)
    if isinstance(value, complex):
        return ctx.mpc(value.real, value.imag)
    if isinstance(value, ctx.mpc):
        return value
    return ctx.convert(value)


def grlex_key(exponents: Exponents) -> tuple[int, Exponents]:
    """Sort key for graded-lexicographic monomial order."""
    return (sum(exponents), exponents)


def _negligible(value: CScalar, tolerance: Scalar) -> bool:
    return bool(abs(value.real) < tolerance and abs(value.imag) < tolerance)


class SparsePoly:
    """Sparse polynomial in ``nvars`` variables.

    Instances are immutable; every operation returns a new polynomial. The
    term map is only reachable through read-only accessors.
    """

    __slots__ = ('_terms', 'nvars', 'precision_bits')

    def __init__(
        self,
        nvars: int,
        terms: Mapping[Exponents, object] | None = None,
        precision_bits: int = DEFAULT_PRECISION_BITS,
    ) -> None:
        """Build a polynomial from a term map.

        Args:
            nvars: Number of variables
            terms: Map from exponent tuple to coefficient
            precision_bits: Working precision of the coefficients

        Raises:
            VariableCountError: If an exponent tuple has the wrong length
            PrecisionMismatchError: If a coefficient carries another precision

        """
        self.nvars = nvars
        self.precision_bits = precision_bits
        tolerance = drop_tolerance(precision_bits)
        cleaned: dict[Exponents, CScalar] = {}
        for exponents, coefficient in (terms or {}).items():
            key = tuple(exponents)
            if len(key) != nvars or any(e < 0 for e in key):
                msg = f'Exponent vector {key} does not fit {nvars} variables'
                raise VariableCountError(msg)
            value = to_scalar(coefficient, precision_bits)
            if not _negligible(value, tolerance):
                cleaned[key] = value
        self._terms = cleaned

    @classmethod
    def _trusted(cls, nvars: int, terms: dict[Exponents, CScalar], precision_bits: int) -> SparsePoly:
        """Wrap an already-validated term map, dropping negligible coefficients."""
        poly = cls.__new__(cls)
        poly.nvars = nvars
        poly.precision_bits = precision_bits
        tolerance = drop_tolerance(precision_bits)
        poly._terms = {k: v for k, v in terms.items() if not _negligible(v, tolerance)}
        return poly

    # Constructors

    @classmethod
    def zero(cls, nvars: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> SparsePoly:
        """The zero polynomial."""
        return cls._trusted(nvars, {}, precision_bits)

    @classmethod
    def constant(cls, value: object, nvars: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> SparsePoly:
        """A constant polynomial."""
        return cls._trusted(nvars, {(0,) * nvars: to_scalar(value, precision_bits)}, precision_bits)

    @classmethod
    def variable(cls, index: int, nvars: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> SparsePoly:
        """The polynomial consisting of variable ``index``."""
        if not 0 <= index < nvars:
            msg = f'Variable index {index} out of range for {nvars} variables'
            raise VariableCountError(msg)
        exponents = tuple(1 if k == index else 0 for k in range(nvars))
        return cls._trusted(nvars, {exponents: scalar_context(precision_bits).one}, precision_bits)

    @classmethod
    def monomial(
        cls,
        exponents: Sequence[int],
        coefficient: object = 1,
        precision_bits: int = DEFAULT_PRECISION_BITS,
    ) -> SparsePoly:
        """A single term."""
        return cls(len(exponents), {tuple(exponents): coefficient}, precision_bits)

    # Accessors

    @property
    def ctx(self) -> Any:  # noqa: ANN401
        """The mpmath context of the coefficients."""
        return scalar_context(self.precision_bits)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        shown = ', '.join(f'{e}: {mpmath.nstr(c, 8)}' for e, c in self.items())
        return f'SparsePoly({self.nvars}, {{{shown}}})'

    def items(self) -> Iterator[tuple[Exponents, CScalar]]:
        """Iterate over terms in graded-lexicographic order."""
        for key in sorted(self._terms, key=grlex_key):
            yield key, self._terms[key]

    def monomials(self) -> list[Exponents]:
        """Exponent tuples of the stored terms, graded-lexicographically ordered."""
        return sorted(self._terms, key=grlex_key)

    def coefficient(self, exponents: Exponents) -> CScalar:
        """Coefficient of a monomial (zero when absent)."""
        return self._terms.get(exponents, self.ctx.zero)

    def term_map(self) -> dict[Exponents, CScalar]:
        """A fresh copy of the term map."""
        return dict(self._terms)

    def is_zero(self) -> bool:
        """True when no term is stored."""
        return not self._terms

    def degree(self) -> float:
        """Maximal total degree; ``NEG_INF_DEGREE`` for the zero polynomial."""
        if not self._terms:
            return NEG_INF_DEGREE
        return max(sum(e) for e in self._terms)

    def max_abs_coefficient(self) -> Scalar:
        """Largest coefficient modulus (zero for the zero polynomial)."""
        ctx = self.ctx
        return max((ctx.fabs(c) for c in self._terms.values()), default=ctx.zero)

    def is_real(self, tolerance: Scalar | None = None) -> bool:
        """True when every imaginary part is at most ``tolerance`` (default 2^(-p/2))."""
        bound = check_tolerance(self.precision_bits) if tolerance is None else tolerance
        return all(abs(c.imag) <= bound for c in self._terms.values())

    def to_real(self) -> SparsePoly:
        """Drop imaginary parts after checking they are negligible.

        Raises:
            NotRealError: If some imaginary part exceeds 2^(-precision_bits/2)

        """
        if not self.is_real():
            worst = max(abs(c.imag) for c in self._terms.values())
            msg = f'Polynomial has imaginary coefficients up to {mpmath.nstr(worst, 5)}'
            raise NotRealError(msg)
        ctx = self.ctx
        return SparsePoly._trusted(self.nvars, {k: ctx.mpf(c.real) for k, c in self._terms.items()}, self.precision_bits)

    def is_close(self, other: SparsePoly, tolerance: Scalar | None = None) -> bool:
        """Coefficientwise comparison within ``tolerance`` (default 2^(-p/2))."""
        bound = check_tolerance(self.precision_bits) if tolerance is None else tolerance
        difference = self - other
        return all(abs(c) <= bound for c in difference._terms.values())  # noqa: SLF001

    # Arithmetic

    def _check_compatible(self, other: SparsePoly) -> None:
        if self.nvars != other.nvars:
            msg = f'Variable count mismatch: {self.nvars} vs {other.nvars}'
            raise VariableCountError(msg)
        if self.precision_bits != other.precision_bits:
            raise PrecisionMismatchError(self.precision_bits, other.precision_bits)

    def _lift(self, other: object) -> SparsePoly:
        if isinstance(other, SparsePoly):
            self._check_compatible(other)
            return other
        return SparsePoly.constant(other, self.nvars, self.precision_bits)

    def __add__(self, other: object) -> SparsePoly:
        rhs = self._lift(other)
        terms = dict(self._terms)
        for key, value in rhs._terms.items():  # noqa: SLF001
            terms[key] = terms[key] + value if key in terms else value
        return SparsePoly._trusted(self.nvars, terms, self.precision_bits)

    __radd__ = __add__

    def __neg__(self) -> SparsePoly:
        return SparsePoly._trusted(self.nvars, {k: -v for k, v in self._terms.items()}, self.precision_bits)

    def __sub__(self, other: object) -> SparsePoly:
        return self + (-self._lift(other))

    def __rsub__(self, other: object) -> SparsePoly:
        return self._lift(other) - self

    def __mul__(self, other: object) -> SparsePoly:
        if not isinstance(other, SparsePoly):
            return self.scale(other)
        self._check_compatible(other)
        terms: dict[Exponents, CScalar] = {}
        for ka, va in self._terms.items():
            for kb, vb in other._terms.items():
                key = tuple(a + b for a, b in zip(ka, kb, strict=True))
                product = va * vb
                terms[key] = terms[key] + product if key in terms else product
        return SparsePoly._trusted(self.nvars, terms, self.precision_bits)

    def __rmul__(self, other: object) -> SparsePoly:
        return self.scale(other)

    def __pow__(self, exponent: int) -> SparsePoly:
        if exponent < 0:
            msg = 'Negative powers are not polynomials'
            raise ValueError(msg)
        result = SparsePoly.constant(1, self.nvars, self.precision_bits)
        base = self
        while exponent:
            if exponent & 1:
                result *= base
            exponent >>= 1
            if exponent:
                base *= base
        return result

    def scale(self, factor: object) -> SparsePoly:
        """Multiply every coefficient by a scalar."""
        value = to_scalar(factor, self.precision_bits)
        return SparsePoly._trusted(self.nvars, {k: v * value for k, v in self._terms.items()}, self.precision_bits)

    def conjugate(self) -> SparsePoly:
        """Complex-conjugate every coefficient."""
        ctx = self.ctx
        return SparsePoly._trusted(self.nvars, {k: ctx.conj(v) for k, v in self._terms.items()}, self.precision_bits)

    def derivative(self, index: int) -> SparsePoly:
        """Formal partial derivative with respect to variable ``index``."""
        self._check_index(index)
        terms: dict[Exponents, CScalar] = {}
        for key, value in self._terms.items():
            power = key[index]
            if power:
                lowered = key[:index] + (power - 1,) + key[index + 1 :]
                terms[lowered] = value * power
        return SparsePoly._trusted(self.nvars, terms, self.precision_bits)

    def _check_index(self, index: int) -> None:
        if not 0 <= index < self.nvars:
            msg = f'Variable index {index} out of range for {self.nvars} variables'
            raise VariableCountError(msg)

    # Composition

    def evaluate(self, point: Sequence[object]) -> CScalar:
        """Evaluate at a point by direct summation of terms.

        Raises:
            VariableCountError: If the point has the wrong length

        """
        if len(point) != self.nvars:
            msg = f'Point of length {len(point)} for polynomial in {self.nvars} variables'
            raise VariableCountError(msg)
        ctx = self.ctx
        coords = [to_scalar(x, self.precision_bits) for x in point]
        powers: list[dict[int, CScalar]] = [{0: ctx.one} for _ in coords]
        total = ctx.zero
        for key, value in self._terms.items():
            term = value
            for k, power in enumerate(key):
                if power:
                    cache = powers[k]
                    if power not in cache:
                        cache[power] = coords[k] ** power
                    term *= cache[power]
            total += term
        return total

    def substitute(self, index: int, replacement: SparsePoly) -> SparsePoly:
        """Compose: replace variable ``index`` by ``replacement``.

        ``replacement`` lives in the same variable space; the result no longer
        depends on variable ``index`` except through ``replacement``.
        """
        self._check_index(index)
        self._check_compatible(replacement)
        result = SparsePoly.zero(self.nvars, self.precision_bits)
        cached_powers: dict[int, SparsePoly] = {}
        for key, value in self._terms.items():
            power = key[index]
            rest = key[:index] + (0,) + key[index + 1 :]
            if power not in cached_powers:
                cached_powers[power] = replacement**power
            result += SparsePoly._trusted(self.nvars, {rest: value}, self.precision_bits) * cached_powers[power]
        return result

    def relabel(self, mapping: Sequence[int], nvars: int) -> SparsePoly:
        """Move variable ``k`` to slot ``mapping[k]`` in a ``nvars``-variable space.

        Slots may coincide, in which case exponents add (variables merge).
        """
        if len(mapping) != self.nvars or any(not 0 <= m < nvars for m in mapping):
            msg = f'Relabeling {list(mapping)} does not map {self.nvars} variables into {nvars}'
            raise VariableCountError(msg)
        terms: dict[Exponents, CScalar] = {}
        for key, value in self._terms.items():
            moved = [0] * nvars
            for k, power in enumerate(key):
                moved[mapping[k]] += power
            new_key = tuple(moved)
            terms[new_key] = terms[new_key] + value if new_key in terms else value
        return SparsePoly._trusted(nvars, terms, self.precision_bits)

    def specialize(self, values: Mapping[int, object]) -> SparsePoly:
        """Fix some variables to scalar values and remove them from the variable list."""
        for index in values:
            self._check_index(index)
        ctx = self.ctx
        kept = [k for k in range(self.nvars) if k not in values]
        fixed = {k: to_scalar(v, self.precision_bits) for k, v in values.items()}
        terms: dict[Exponents, CScalar] = {}
        for key, value in self._terms.items():
            factor = value
            for k, x in fixed.items():
                if key[k]:
                    factor *= x ** key[k]
            new_key = tuple(key[k] for k in kept)
            terms[new_key] = terms.get(new_key, ctx.zero) + factor
        return SparsePoly._trusted(len(kept), terms, self.precision_bits)


def poly_add(a: SparsePoly, b: SparsePoly) -> SparsePoly:
    """Coefficientwise sum of two polynomials in the same variables."""
    return a + b


def poly_mul(a: SparsePoly, b: SparsePoly) -> SparsePoly:
    """Product of two polynomials in the same variables."""
    return a * b


def poly_eval(p: SparsePoly, point: Sequence[object]) -> CScalar:
    """Evaluate ``p`` at ``point``."""
    return p.evaluate(point)


def substitute(p: SparsePoly, var_index: int, replacement: SparsePoly) -> SparsePoly:
    """Replace variable ``var_index`` of ``p`` by ``replacement``."""
    return p.substitute(var_index, replacement)


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


@functools.cache
def sphere_monomial_integral(a: int, b: int, c: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> Scalar:
    """Integral of x^a y^b z^c over the unit sphere with total mass 1.

    Zero when an exponent is odd, otherwise (a-1)!!(b-1)!!(c-1)!!/(a+b+c+1)!!.
    """
    ctx = scalar_context(precision_bits)
    if a % 2 or b % 2 or c % 2:
        return ctx.zero
    numerator = _double_factorial(a - 1) * _double_factorial(b - 1) * _double_factorial(c - 1)
    return ctx.mpf(numerator) / _double_factorial(a + b + c + 1)


def product_sphere_inner_product(p: SparsePoly, q: SparsePoly, npoints: int) -> CScalar:
    """Integral of p * conj(q) over the product of ``npoints`` unit spheres.

    Raises:
        VariableCountError: If p or q is not in 3 * npoints variables

    """
    if p.nvars != 3 * npoints or q.nvars != 3 * npoints:
        msg = f'Expected polynomials in {3 * npoints} variables, got {p.nvars} and {q.nvars}'
        raise VariableCountError(msg)
    if p.precision_bits != q.precision_bits:
        raise PrecisionMismatchError(p.precision_bits, q.precision_bits)
    bits = p.precision_bits
    ctx = p.ctx
    total = ctx.zero
    for ka, va in p.items():
        for kb, vb in q.items():
            weight = ctx.one
            for k in range(npoints):
                a, b, c = (ka[3 * k + j] + kb[3 * k + j] for j in range(3))
                weight *= sphere_monomial_integral(a, b, c, bits)
                if not weight:
                    break
            if weight:
                total += va * ctx.conj(vb) * weight
    return total


def sphere_inner_product(p: SparsePoly, q: SparsePoly) -> CScalar:
    """The L2 inner product of two polynomials on the unit sphere with mass 1."""
    return product_sphere_inner_product(p, q, 1)


def random_unit_vectors(
    rng: np.random.Generator,
    count: int,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> list[tuple[Scalar, Scalar, Scalar]]:
    """Uniform points on the unit sphere, drawn in machine precision and normalized at ``precision_bits``."""
    ctx = scalar_context(precision_bits)
    draws = rng.standard_normal((count, 3))
    points = []
    for row in draws:
        x, y, z = (ctx.mpf(float(v)) for v in row)
        norm = ctx.sqrt(x * x + y * y + z * z)
        points.append((x / norm, y / norm, z / norm))
    return points


def dot(left: Sequence[Scalar], right: Sequence[Scalar]) -> Scalar:
    """Euclidean inner product of two coordinate vectors."""
    return sum((a * b for a, b in zip(left, right, strict=True)), start=0)
