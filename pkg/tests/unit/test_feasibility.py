"""Unit tests for the sampled dual-feasibility check."""

from __future__ import annotations

import pytest


@pytest.fixture(scope='module')
def blocks():
    from rieszbound.domain.subsetspace import zonal_blocks

    return zonal_blocks(0)


class TestFreeValues:
    """Test suite for the split free variables."""

    def test_differences(self) -> None:
        """a_i is the plus half minus the minus half; missing halves are zero."""
        from rieszbound.domain.feasibility import free_values
        from rieszbound.domain.sosmodel import VarKey

        assignment = {VarKey('a2+'): 3.0, VarKey('a2-'): 1.0, VarKey('a4-'): 0.5}

        assert free_values(assignment) == [0.0, 0.0, 2.0, 0.0, -0.5]


class TestKernelPolynomials:
    """Test suite for evaluating A_2 K directly."""

    def test_zero_assignment(self, blocks) -> None:
        """Without F entries the kernel vanishes on every cardinality."""
        from rieszbound.domain.feasibility import kernel_polynomials

        kernels = kernel_polynomials(blocks, {})

        assert sorted(kernels) == [0, 1, 2, 3, 4]
        assert all(kernel.is_zero() for kernel in kernels.values())

    def test_empty_set_entry(self, blocks) -> None:
        """The empty-empty entry gives 1 on the empty set."""
        from rieszbound.domain.feasibility import kernel_polynomials
        from rieszbound.domain.sosmodel import VarKey

        kernels = kernel_polynomials(blocks, {VarKey('F(0,+)', 0, 0): 1.0})

        assert kernels[0].evaluate([]) == 1


class TestSampling:
    """Test suite for the sampled check."""

    def test_zero_solution_is_feasible(self, blocks) -> None:
        """K = 0 and a = 0 satisfy every constraint; pairs have slack f(S)."""
        from rieszbound.domain.feasibility import sample_dual_feasibility

        report = sample_dual_feasibility(blocks, {}, 1, 0.5, 5, seed=3)

        assert report.max_violation == 0.0
        assert report.by_cardinality[2] < -0.5
        assert report.samples == 1 + 4 * 5
        assert report.passes(1e-9)

    def test_positive_a0_is_a_violation(self, blocks) -> None:
        """q_0 = a_0 must be nonpositive."""
        from rieszbound.domain.feasibility import sample_dual_feasibility
        from rieszbound.domain.sosmodel import VarKey

        report = sample_dual_feasibility(blocks, {VarKey('a0+'): 1.0}, 1, 0.5, 2, seed=3)

        assert report.by_cardinality[0] == 1.0
        assert not report.passes(1e-6)

    def test_seed_is_reproducible(self, blocks) -> None:
        """The same seed samples the same sets."""
        from rieszbound.domain.feasibility import sample_dual_feasibility

        first = sample_dual_feasibility(blocks, {}, 2, 0.5, 3, seed=11)
        second = sample_dual_feasibility(blocks, {}, 2, 0.5, 3, seed=11)

        assert first == second
