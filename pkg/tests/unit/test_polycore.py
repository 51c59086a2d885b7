"""Unit tests for sparse polynomials and precision contexts."""

from __future__ import annotations

import pytest


class TestScalarContext:
    """Test suite for per-precision mpmath contexts."""

    def test_context_is_shared_per_precision(self) -> None:
        """The same precision yields the same context."""
        from rieszbound.domain.polycore import scalar_context

        assert scalar_context(128) is scalar_context(128)
        assert scalar_context(128) is not scalar_context(192)
        assert scalar_context(192).prec == 192

    def test_rejects_nonpositive_precision(self) -> None:
        """Zero bits is not a precision."""
        from rieszbound.domain.polycore import scalar_context

        with pytest.raises(ValueError, match='positive'):
            scalar_context(0)

    def test_to_scalar_rejects_foreign_precision(self) -> None:
        """Values carry their precision and are not silently converted."""
        from rieszbound.domain.exceptions import PrecisionMismatchError
        from rieszbound.domain.polycore import scalar_context, to_scalar

        value = scalar_context(128).mpf(1) / 3

        with pytest.raises(PrecisionMismatchError) as excinfo:
            to_scalar(value, 256)

        assert excinfo.value.left == 128
        assert excinfo.value.right == 256

    def test_tolerances_scale_with_precision(self) -> None:
        """Drop tolerance is 2^(16-p), check tolerance 2^(-p/2)."""
        from rieszbound.domain.polycore import check_tolerance, drop_tolerance, scalar_context

        ctx = scalar_context(256)

        assert drop_tolerance(256) == ctx.ldexp(1, -240)
        assert check_tolerance(256) == ctx.ldexp(1, -128)


class TestSparsePoly:
    """Test suite for SparsePoly arithmetic."""

    def test_add_and_subtract(self) -> None:
        """Adding then subtracting returns the original polynomial."""
        from rieszbound.domain.polycore import SparsePoly

        x = SparsePoly.variable(0, 2)
        y = SparsePoly.variable(1, 2)
        p = x * x + 3 * y

        assert ((p + y) - y).is_close(p)
        assert (p - p).is_zero()

    def test_multiply_binomial(self) -> None:
        """(x + y)^2 expands to x^2 + 2xy + y^2."""
        from rieszbound.domain.polycore import SparsePoly

        x = SparsePoly.variable(0, 2)
        y = SparsePoly.variable(1, 2)
        square = (x + y) ** 2

        assert square.coefficient((2, 0)) == 1
        assert square.coefficient((1, 1)) == 2
        assert square.coefficient((0, 2)) == 1
        assert len(square) == 3
        assert square.degree() == 2

    def test_zero_polynomial_degree(self) -> None:
        """The zero polynomial has degree minus infinity."""
        from rieszbound.domain.polycore import NEG_INF_DEGREE, SparsePoly

        assert SparsePoly.zero(3).degree() == NEG_INF_DEGREE

    def test_negligible_terms_are_dropped(self) -> None:
        """Coefficients below the drop tolerance are not stored."""
        from rieszbound.domain.polycore import SparsePoly, scalar_context

        tiny = scalar_context(256).ldexp(1, -250)
        p = SparsePoly(1, {(0,): 1, (1,): tiny})

        assert p.monomials() == [(0,)]

    def test_mixed_variable_counts_fail(self) -> None:
        """Polynomials in different variable spaces do not combine."""
        from rieszbound.domain.exceptions import VariableCountError
        from rieszbound.domain.polycore import SparsePoly

        with pytest.raises(VariableCountError):
            SparsePoly.variable(0, 2) + SparsePoly.variable(0, 3)

    def test_mixed_precisions_fail(self) -> None:
        """Polynomials at different precisions do not combine."""
        from rieszbound.domain.exceptions import PrecisionMismatchError
        from rieszbound.domain.polycore import SparsePoly

        with pytest.raises(PrecisionMismatchError):
            SparsePoly.variable(0, 1, 128) * SparsePoly.variable(0, 1, 256)

    def test_bad_exponent_vector(self) -> None:
        """Exponent tuples must match the variable count."""
        from rieszbound.domain.exceptions import VariableCountError
        from rieszbound.domain.polycore import SparsePoly

        with pytest.raises(VariableCountError):
            SparsePoly(2, {(1,): 1})

    def test_evaluate(self) -> None:
        """Evaluation sums the terms at the point."""
        from rieszbound.domain.polycore import SparsePoly

        x = SparsePoly.variable(0, 2)
        y = SparsePoly.variable(1, 2)
        p = x**3 - 2 * x * y + 5

        assert p.evaluate([2, 3]) == 8 - 12 + 5

    def test_evaluate_wrong_length(self) -> None:
        """A point must have one coordinate per variable."""
        from rieszbound.domain.exceptions import VariableCountError
        from rieszbound.domain.polycore import SparsePoly

        with pytest.raises(VariableCountError):
            SparsePoly.variable(0, 2).evaluate([1])

    def test_substitute(self) -> None:
        """Replacing x by y + 1 in x^2 gives y^2 + 2y + 1."""
        from rieszbound.domain.polycore import SparsePoly, substitute

        x = SparsePoly.variable(0, 2)
        y = SparsePoly.variable(1, 2)
        result = substitute(x * x, 0, y + 1)

        assert result.is_close(y * y + 2 * y + 1)

    def test_relabel_merges_slots(self) -> None:
        """Two variables mapped to one slot multiply."""
        from rieszbound.domain.polycore import SparsePoly

        x = SparsePoly.variable(0, 2)
        y = SparsePoly.variable(1, 2)
        merged = (x * y).relabel([0, 0], 1)

        assert merged.coefficient((2,)) == 1

    def test_specialize(self) -> None:
        """Fixing x = 2 in x*y + x leaves 2y + 2."""
        from rieszbound.domain.polycore import SparsePoly

        x = SparsePoly.variable(0, 2)
        y = SparsePoly.variable(1, 2)
        result = (x * y + x).specialize({0: 2})

        assert result.nvars == 1
        assert result.coefficient((1,)) == 2
        assert result.coefficient((0,)) == 2

    def test_derivative(self) -> None:
        """d/dx of x^3 y is 3 x^2 y."""
        from rieszbound.domain.polycore import SparsePoly

        p = SparsePoly.monomial((3, 1))

        assert p.derivative(0).coefficient((2, 1)) == 3
        assert p.derivative(1).coefficient((3, 0)) == 1

    def test_to_real_rejects_imaginary_parts(self) -> None:
        """Only negligible imaginary parts may be dropped."""
        from rieszbound.domain.exceptions import NotRealError
        from rieszbound.domain.polycore import SparsePoly

        with pytest.raises(NotRealError):
            SparsePoly(1, {(1,): 1j}).to_real()

        real = SparsePoly(1, {(1,): complex(2, 0)}).to_real()
        assert real.coefficient((1,)) == 2

    def test_negative_power_rejected(self) -> None:
        """Negative powers are not polynomials."""
        from rieszbound.domain.polycore import SparsePoly

        with pytest.raises(ValueError, match='Negative'):
            SparsePoly.variable(0, 1) ** -1

    def test_items_are_graded_lexicographic(self) -> None:
        """Terms come out lower degree first."""
        from rieszbound.domain.polycore import SparsePoly

        p = SparsePoly(2, {(2, 0): 1, (0, 0): 1, (0, 1): 1})

        assert [key for key, _ in p.items()] == [(0, 0), (0, 1), (2, 0)]


class TestSphereIntegrals:
    """Test suite for monomial integrals on the unit sphere."""

    def test_total_mass_is_one(self) -> None:
        """The constant 1 integrates to 1."""
        from rieszbound.domain.polycore import sphere_monomial_integral

        assert sphere_monomial_integral(0, 0, 0) == 1

    def test_second_moments(self) -> None:
        """Each squared coordinate averages to 1/3."""
        from rieszbound.domain.polycore import scalar_context, sphere_monomial_integral

        ctx = scalar_context(256)

        assert ctx.almosteq(sphere_monomial_integral(2, 0, 0), ctx.mpf(1) / 3)
        assert sphere_monomial_integral(1, 1, 0) == 0

    def test_inner_product_of_coordinates(self) -> None:
        """<z, z> = 1/3 and <x, z> = 0."""
        from rieszbound.domain.polycore import SparsePoly, scalar_context, sphere_inner_product

        ctx = scalar_context(256)
        x = SparsePoly.variable(0, 3)
        z = SparsePoly.variable(2, 3)

        assert ctx.almosteq(sphere_inner_product(z, z), ctx.mpf(1) / 3)
        assert sphere_inner_product(x, z) == 0

    def test_product_inner_product_variable_count(self) -> None:
        """Product-sphere integration needs three variables per point."""
        from rieszbound.domain.exceptions import VariableCountError
        from rieszbound.domain.polycore import SparsePoly, product_sphere_inner_product

        p = SparsePoly.variable(0, 4)

        with pytest.raises(VariableCountError):
            product_sphere_inner_product(p, p, 2)


class TestRandomUnitVectors:
    """Test suite for sampling points on the sphere."""

    def test_points_are_unit_and_reproducible(self) -> None:
        """Seeded draws are normalized and repeat."""
        import numpy as np

        from rieszbound.domain.polycore import dot, random_unit_vectors, scalar_context

        ctx = scalar_context(128)
        first = random_unit_vectors(np.random.default_rng(3), 4, 128)
        second = random_unit_vectors(np.random.default_rng(3), 4, 128)

        assert first == second
        for point in first:
            assert ctx.almosteq(dot(point, point), 1, ctx.ldexp(1, -100))
