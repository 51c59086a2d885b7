"""Unit tests for the SOS models of pair, triple and quadruple constraints."""

from __future__ import annotations

import numpy as np
import pytest


def _scalar_form(nvars: int, name: str = 'c'):
    """The form c * 1 for a single program scalar c."""
    from rieszbound.domain.polycore import SparsePoly
    from rieszbound.domain.sosmodel import PolyForm, VarKey

    return PolyForm(nvars, None, {VarKey(name): SparsePoly.constant(1, nvars)})


def _univariate_form(degree: int):
    """The form sum over k of c_k u^k with one program scalar per coefficient."""
    from rieszbound.domain.polycore import SparsePoly
    from rieszbound.domain.sosmodel import PolyForm, VarKey

    return PolyForm(1, None, {VarKey(f'c{k}'): SparsePoly.monomial((k,), 1) for k in range(degree + 1)})


def _psd_terms(identity, rng: np.random.Generator):
    """Sum of the SOS terms of an identity for random PSD values of every block."""
    from rieszbound.domain.polycore import SparsePoly, scalar_context
    from rieszbound.domain.sosmodel import VarKey

    ctx = scalar_context(256)
    assignment = {}
    for block in identity.blocks():
        factor = rng.standard_normal((block.size, block.size))
        gram = factor @ factor.T
        for r in range(block.size):
            for c in range(r, block.size):
                assignment[VarKey(block.name, r, c)] = ctx.mpf(float(gram[r, c]))
    total = SparsePoly.zero(identity.target.nvars)
    for term in identity.terms:
        total += term.contribution().evaluate(assignment)
    return total


class TestPolyForm:
    """Test suite for polynomials with affine coefficients."""

    def test_accumulate_merges_keys(self) -> None:
        """Repeated keys are summed."""
        from rieszbound.domain.polycore import SparsePoly
        from rieszbound.domain.sosmodel import PolyForm, VarKey

        x = SparsePoly.variable(0, 1)
        form = PolyForm.accumulate(1, [(VarKey('a'), x), (VarKey('a'), x), (VarKey('b'), x - x)])

        assert form.variables() == [VarKey('a')]
        assert form.parts[VarKey('a')].coefficient((1,)) == 2

    def test_evaluate(self) -> None:
        """Substituting values gives a plain polynomial."""
        from rieszbound.domain.polycore import SparsePoly
        from rieszbound.domain.sosmodel import PolyForm, VarKey

        x = SparsePoly.variable(0, 1)
        form = PolyForm(1, SparsePoly.constant(1, 1), {VarKey('a'): x, VarKey('b'): x * x})

        value = form.evaluate({VarKey('a'): 3})

        assert value.coefficient((0,)) == 1
        assert value.coefficient((1,)) == 3
        assert value.coefficient((2,)) == 0

    def test_parts_must_share_variables(self) -> None:
        """Every part lives in the form's variable space."""
        from rieszbound.domain.exceptions import VariableCountError
        from rieszbound.domain.polycore import SparsePoly
        from rieszbound.domain.sosmodel import PolyForm, VarKey

        with pytest.raises(VariableCountError):
            PolyForm(1, None, {VarKey('a'): SparsePoly.variable(0, 2)})


class TestSemialgebraicSet:
    """Test suite for the description of independent sets."""

    def test_gram_minor(self) -> None:
        """A 2x2 principal minor of E(u) is 1 - u^2."""
        from rieszbound.domain.sosmodel import principal_minors

        (subset, minor), *_ = principal_minors(3, 2)

        assert subset == (0, 1)
        assert minor.coefficient((0, 0, 0)) == 1
        assert minor.coefficient((2, 0, 0)) == -1

    @pytest.mark.parametrize(('i', 'inequalities', 'equalities'), [(3, 7, 0), (4, 16, 1)])
    def test_generator_counts(self, i: int, inequalities: int, equalities: int) -> None:
        """Edges, 2-minors and 3-minors, plus det E for quadruples."""
        from rieszbound.domain.sosmodel import build_P

        semialgebraic = build_P(i, 0.5)

        assert len(semialgebraic.inequalities) == inequalities
        assert len(semialgebraic.equalities) == equalities

    def test_only_triples_and_quadruples(self) -> None:
        """Pairs use the univariate model instead."""
        from rieszbound.domain.exceptions import VariableCountError
        from rieszbound.domain.sosmodel import build_P

        with pytest.raises(VariableCountError):
            build_P(2, 0.5)

    def test_threshold_range(self) -> None:
        """U must lie strictly inside (-1, 1)."""
        from rieszbound.domain.exceptions import ThresholdError
        from rieszbound.domain.sosmodel import build_P

        with pytest.raises(ThresholdError):
            build_P(3, 1.0)

    def test_regular_tetrahedron_is_contained(self) -> None:
        """Four points with pairwise inner product -1/3 satisfy every generator."""
        from rieszbound.domain.polycore import scalar_context
        from rieszbound.domain.sosmodel import build_P

        ctx = scalar_context(256)
        semialgebraic = build_P(4, 0.5)

        assert semialgebraic.contains([ctx.mpf(-1) / 3] * 6)
        assert not semialgebraic.contains([ctx.mpf(0.9)] * 6)

    def test_samples_are_contained(self) -> None:
        """Sampled edge vectors of independent triples lie in P_3."""
        from rieszbound.domain.sosmodel import build_P, sample_P

        semialgebraic = build_P(3, 0.5)

        for u in sample_P(3, 0.5, 10, np.random.default_rng(4)):
            assert semialgebraic.contains(u)


class TestPairConstraint:
    """Test suite for the univariate pair model."""

    @pytest.mark.parametrize(
        ('s', 'd', 'form', 'expected'),
        [
            (1, 0, 'w', {'h1': 0}),
            (3, 2, 'w', {'h1': 3}),
            (2, 0, 'w', {'h2': 1, 'h3': 0}),
            (4, 1, 'w', {'h2': 3, 'h3': 2}),
            (2, 0, 'u', {'h4': 0}),
            (2, 2, 'u', {'h4': 1}),
            (4, 0, 'u', {'h2': 1, 'h3': 0}),
        ],
    )
    def test_lukacs_degrees(self, s: int, d: int, form: str, expected: dict[str, int]) -> None:
        """Half-degrees match the parity of the certificate."""
        from rieszbound.domain.sosmodel import lukacs_degrees

        assert lukacs_degrees(s, d, form) == expected

    def test_u_form_needs_even_s(self) -> None:
        """(2 - 2u)^(s/2) is a polynomial only for even s."""
        from rieszbound.domain.exceptions import DegreeError
        from rieszbound.domain.sosmodel import lukacs_pair_constraint

        with pytest.raises(DegreeError):
            lukacs_pair_constraint(_scalar_form(1), 1, 0, 0.5, 'u')

    def test_w_form_rows(self) -> None:
        """c w - 1 + Q1 (w - L) + Q2 (2 - w) = 0 gives one row per power of w."""
        from rieszbound.domain.polycore import check_tolerance, scalar_context
        from rieszbound.domain.sosmodel import VarKey, assemble_identity_rows, lukacs_pair_constraint

        ctx = scalar_context(256)
        identity = lukacs_pair_constraint(_scalar_form(1), 1, 0, 0.5)
        rows = assemble_identity_rows(identity)

        assert [block.name for block in identity.blocks()] == ['Q2.1', 'Q2.2']
        assert [row.monomial for row in rows] == [(0,), (1,)]
        constant_row, linear_row = rows
        assert constant_row.constant == -1
        assert abs(constant_row.coefficients[VarKey('Q2.1')] + ctx.sqrt(2 - 2 * ctx.mpf(0.5))) <= check_tolerance(256)
        assert constant_row.coefficients[VarKey('Q2.2')] == 2
        assert linear_row.coefficients == {VarKey('c'): 1, VarKey('Q2.1'): 1, VarKey('Q2.2'): -1}

    def test_w_form_for_even_s_reaches_the_top_degree(self) -> None:
        """For s = 2 the w^2 row carries c, so q2 = c is not forced to vanish."""
        from rieszbound.domain.sosmodel import VarKey, assemble_identity_rows, lukacs_pair_constraint

        identity = lukacs_pair_constraint(_scalar_form(1), 2, 0, 0.5, 'w')
        rows = assemble_identity_rows(identity)

        assert {block.name: block.size for block in identity.blocks()} == {'Q2.1': 2, 'Q2.2': 1}
        assert [row.monomial for row in rows] == [(0,), (1,), (2,)]
        assert rows[-1].coefficients == {VarKey('c'): 1, VarKey('Q2.1', 1, 1): 1, VarKey('Q2.2'): -1}

    @pytest.mark.parametrize(('s', 'd'), [(1, 0), (1, 1), (1, 2), (1, 3), (2, 1), (4, 2)])
    def test_w_form_matches_the_target_degree(self, s: int, d: int) -> None:
        """The certificate spans every power of w up to deg w^s q2(1 - w^2/2) = s + 2d."""
        from rieszbound.domain.sosmodel import assemble_identity_rows, lukacs_pair_constraint

        identity = lukacs_pair_constraint(_univariate_form(d), s, d, 0.5, 'w')
        rows = assemble_identity_rows(identity)
        block_names = {block.name for block in identity.blocks()}

        assert identity.target.degree() == s + 2 * d
        assert max(term.contribution().degree() for term in identity.terms) == s + 2 * d
        assert [row.monomial for row in rows] == [(k,) for k in range(s + 2 * d + 1)]
        assert all(any(key.block in block_names for key in row.coefficients) for row in rows)

    @pytest.mark.parametrize(('c', 'feasible'), [(-1.0, True), (0.3, True), (0.5, True), (0.6, False)])
    def test_w_form_certifies_exactly_the_feasible_constants(self, c: float, feasible: bool) -> None:
        """For s = 1, d = 0 the rows have a nonnegative solution exactly when w c <= 1 on the interval, i.e. c <= 1/2."""
        from scipy.optimize import nnls

        from rieszbound.domain.sosmodel import VarKey, assemble_identity_rows, lukacs_pair_constraint

        identity = lukacs_pair_constraint(_scalar_form(1), 1, 0, 0.5, 'w')
        rows = assemble_identity_rows(identity)
        blocks = [VarKey(block.name) for block in identity.blocks()]
        matrix = np.array([[float(row.coefficients.get(key, 0)) for key in blocks] for row in rows])
        rhs = np.array([-float(row.constant) - c * float(row.coefficients.get(VarKey('c'), 0)) for row in rows])

        _, residual = nnls(matrix, rhs)

        assert (residual <= 1e-9) == feasible

    @pytest.mark.parametrize('pair_form', ['w', 'u'])
    def test_pair_certificate_is_nonnegative_on_the_interval(self, pair_form: str) -> None:
        """Random PSD blocks give a polynomial that is nonnegative wherever the pair constraint applies."""
        from rieszbound.domain.polycore import scalar_context
        from rieszbound.domain.sosmodel import lukacs_pair_constraint

        ctx = scalar_context(256)
        identity = lukacs_pair_constraint(_univariate_form(2), 2, 2, 0.5, pair_form)
        certificate = _psd_terms(identity, np.random.default_rng(11))
        if pair_form == 'w':
            points = np.linspace(1.0, 2.0, 200)
        else:
            points = np.linspace(-1.0, 0.5, 200)

        assert all(certificate.evaluate([ctx.mpf(float(x))]).real >= -1e-30 for x in points)

    def test_pair_variable_count(self) -> None:
        """The pair polynomial is univariate."""
        from rieszbound.domain.exceptions import VariableCountError
        from rieszbound.domain.sosmodel import lukacs_pair_constraint

        with pytest.raises(VariableCountError):
            lukacs_pair_constraint(_scalar_form(2), 1, 0, 0.5)

    def test_inconsistent_constant_row(self) -> None:
        """A constant with no variable to balance it is an error."""
        from rieszbound.domain.exceptions import InconsistentConstraintError
        from rieszbound.domain.polycore import SparsePoly
        from rieszbound.domain.sosmodel import PolyForm, SosIdentity, assemble_identity_rows

        identity = SosIdentity(name='broken', target=PolyForm(1, SparsePoly.constant(1, 1)))

        with pytest.raises(InconsistentConstraintError):
            assemble_identity_rows(identity)


class TestPutinarIdentity:
    """Test suite for the triple and quadruple models."""

    def test_plain_blocks_for_triples(self) -> None:
        """At delta 2 the constant gets a linear basis and degree-1 and -2 generators a constant."""
        from rieszbound.domain.sosmodel import putinar_identity

        identity = putinar_identity(3, _scalar_form(3), 2, 0.5, symmetry=False)

        sizes = {block.name: block.size for block in identity.blocks()}
        assert sizes == {
            'Q3.one': 4,
            'Q3.edge_01': 1,
            'Q3.edge_02': 1,
            'Q3.edge_12': 1,
            'Q3.minor2_01': 1,
            'Q3.minor2_02': 1,
            'Q3.minor2_12': 1,
        }
        assert identity.free_terms == []

    def test_symmetric_blocks_for_triples(self) -> None:
        """Orbits share stabilizer-isotypic blocks."""
        from rieszbound.domain.sosmodel import putinar_identity

        identity = putinar_identity(3, _scalar_form(3), 2, 0.5, symmetry=True)

        sizes = {block.name: block.size for block in identity.blocks()}
        assert sizes['Q3.0.0.[3]'] == 2
        assert sizes['Q3.0.0.[2,1]'] == 1
        assert len(sizes) == 4

    def test_quadruples_get_det_multiplier(self) -> None:
        """det E(u) carries a free multiplier once delta reaches 6."""
        from rieszbound.domain.sosmodel import putinar_identity

        identity = putinar_identity(4, _scalar_form(6), 6, 0.5, symmetry=False)

        assert identity.scalars() == ['q4det+000000', 'q4det-000000']

    def test_degree_guard(self) -> None:
        """q above delta needs pinning."""
        from rieszbound.domain.exceptions import DegreeError
        from rieszbound.domain.polycore import SparsePoly
        from rieszbound.domain.sosmodel import PolyForm, VarKey, putinar_identity

        q = PolyForm(3, None, {VarKey('c'): SparsePoly.monomial((2, 0, 0))})

        with pytest.raises(DegreeError):
            putinar_identity(3, q, 1, 0.5)

        pinned = putinar_identity(3, q, 1, 0.5, pin_excess=True)
        assert pinned.name == 'putinar3'

    @pytest.mark.parametrize(('i', 'symmetry'), [(3, False), (3, True), (4, False), (4, True)])
    def test_certificate_is_nonnegative_on_samples(self, i: int, symmetry: bool) -> None:
        """Random PSD blocks give a polynomial that is nonnegative at 200 sampled points of P_i."""
        from rieszbound.domain.sosmodel import putinar_identity, sample_P

        identity = putinar_identity(i, _scalar_form(i * (i - 1) // 2), 4, 0.5, symmetry=symmetry)
        certificate = _psd_terms(identity, np.random.default_rng(i))

        for u in sample_P(i, 0.5, 200, np.random.default_rng(100 + i)):
            assert certificate.evaluate(u).real >= -1e-30

    def test_symmetric_and_plain_models_share_rows(self) -> None:
        """Both models constrain the same monomials, and the symmetric one only produces invariants."""
        from rieszbound.domain.groups import act_on_poly
        from rieszbound.domain.invariants import edge_action_image
        from rieszbound.domain.sosmodel import assemble_identity_rows, putinar_identity

        plain = putinar_identity(3, _scalar_form(3), 4, 0.5, symmetry=False)
        symmetric = putinar_identity(3, _scalar_form(3), 4, 0.5, symmetry=True)
        certificate = _psd_terms(symmetric, np.random.default_rng(5))

        assert [row.monomial for row in assemble_identity_rows(plain)] == [
            row.monomial for row in assemble_identity_rows(symmetric)
        ]
        assert sum(block.size for block in symmetric.blocks()) < sum(block.size for block in plain.blocks())
        for perm in edge_action_image(3).elements:
            assert act_on_poly(perm, certificate).is_close(certificate)

    def test_symmetric_rows_assemble(self) -> None:
        """The symmetric identity yields one row per monomial of degree at most delta."""
        from rieszbound.domain.sosmodel import assemble_identity_rows, putinar_identity

        identity = putinar_identity(3, _scalar_form(3), 2, 0.5, symmetry=True)
        rows = assemble_identity_rows(identity)

        assert len(rows) == 10
        assert all(sum(row.monomial) <= 2 for row in rows)


class TestBlockSizes:
    """Test suite for SOS block sizes."""

    def test_plain_sizes(self) -> None:
        """Monomial bases in six edge variables."""
        from rieszbound.domain.sosmodel import sos_block_sizes

        sizes = sos_block_sizes(4, 4, symmetry=False)

        assert sizes == {'Q': [28], 'minor2': [7], 'minor3': [1], 'edge': [7]}

    def test_symmetric_sizes(self) -> None:
        """Largest isotypic blocks at delta 4."""
        from rieszbound.domain.sosmodel import sos_block_sizes

        sizes = sos_block_sizes(4, 4, symmetry=True)

        assert max(sizes['Q']) == 5
        assert max(sizes['minor2']) == 4
        assert max(sizes['minor3']) == 1

    def test_negative_half_degree(self) -> None:
        """Generators above delta get no block."""
        from rieszbound.domain.sosmodel import sos_block_sizes

        assert sos_block_sizes(4, 1, symmetry=False)['minor2'] == []
        assert sos_block_sizes(4, 1, symmetry=True)['minor3'] == []
