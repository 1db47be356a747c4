import numpy as np
import pytest

from klrep.dna_model import DNA_PARTITION, FIG2_PARAMS, effective_kernel
from klrep.markov_core import (
    BlockPartition,
    NonUniqueInvariant,
    StochasticKernel,
    ZeroBlockMass,
    apply_kernel,
    block_invariant_distribution,
    block_kernel,
    block_masses,
    check_block_invariance,
    conditional_distribution,
    is_primitive,
    iterate_kernel,
)

P0 = np.array([0.6, 0.1, 0.2, 0.1])


def two_by_two(a, b):
    return np.array([[1 - a, a], [b, 1 - b]])


def naive_apply(p, T):
    n = len(p)
    return np.array([sum(p[x] * T[x][y] for x in range(n)) for y in range(n)])


class TestPartition:
    def test_from_sizes(self):
        assert BlockPartition.from_sizes([2, 2]).blocks == ((0, 1), (2, 3))

    @pytest.mark.parametrize("blocks", [((0, 1), (1, 2)), ((0,), ()), ((0, 2),), ()])
    def test_invalid(self, blocks):
        with pytest.raises(ValueError):
            BlockPartition(blocks)

    def test_labels(self):
        assert DNA_PARTITION.labels().tolist() == [0, 0, 1, 1]


class TestKernel:
    def test_rejects_non_stochastic(self):
        with pytest.raises(ValueError):
            StochasticKernel(np.array([[0.5, 0.4], [0.5, 0.5]]))

    def test_rejects_cross_block_with_partition(self):
        with pytest.raises(ValueError):
            StochasticKernel(np.full((4, 4), 0.25), DNA_PARTITION)

    def test_immutable(self):
        K = StochasticKernel(np.eye(2))
        with pytest.raises(ValueError):
            K.matrix[0, 0] = 0.0


class TestApplyKernel:
    def test_identity(self):
        p = np.full(4, 0.25)
        assert np.array_equal(apply_kernel(p, np.eye(4)), p)

    def test_dna_kernel_preserves_at_mass(self):
        q = apply_kernel(P0, effective_kernel(FIG2_PARAMS))
        assert abs(q[0] + q[1] - 0.7) < 1e-15

    def test_against_double_loop(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 8))
            p = rng.dirichlet(np.ones(n))
            T = rng.dirichlet(np.ones(n), size=n)
            assert np.max(np.abs(apply_kernel(p, T) - naive_apply(p, T))) < 1e-14

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_kernel([0.5, 0.5], np.eye(3))

    def test_reports_defect(self):
        _, defect = apply_kernel(P0, np.eye(4), return_defect=True)
        assert defect < 1e-15


class TestBlockInvariance:
    def test_dna_kernel(self):
        assert check_block_invariance(effective_kernel(FIG2_PARAMS), DNA_PARTITION)

    def test_uniform_kernel(self):
        assert not check_block_invariance(np.full((4, 4), 0.25), DNA_PARTITION)

    @pytest.mark.parametrize("sizes", [[4], [1, 3], [2, 2], [1, 1, 1, 1]])
    def test_identity_any_partition(self, sizes):
        assert check_block_invariance(np.eye(4), BlockPartition.from_sizes(sizes))


class TestMasses:
    def test_block_masses(self):
        assert np.allclose(block_masses(P0, DNA_PARTITION), [0.7, 0.3], atol=1e-15)
        assert np.allclose(block_masses(np.full(4, 0.25), DNA_PARTITION), [0.5, 0.5])
        assert block_masses(P0, BlockPartition.from_sizes([4])).tolist() == pytest.approx([1.0])

    def test_conditional(self):
        c = conditional_distribution(P0, DNA_PARTITION, 0)
        assert np.allclose(c, [6 / 7, 1 / 7], atol=1e-15)

    def test_conditional_single_block_support(self):
        p = np.array([0.3, 0.7, 0.0, 0.0])
        assert np.array_equal(conditional_distribution(p, DNA_PARTITION, 0), [0.3, 0.7])

    def test_zero_block_mass(self):
        with pytest.raises(ZeroBlockMass):
            conditional_distribution([0.3, 0.7, 0.0, 0.0], DNA_PARTITION, 1)


class TestInvariant:
    def test_at_block(self):
        pi = block_invariant_distribution(two_by_two(0.0155, 0.0079))
        assert np.max(np.abs(pi - [0.3376, 0.6624])) < 5e-5

    def test_gc_block(self):
        pi = block_invariant_distribution(two_by_two(0.0110, 0.0165))
        assert np.max(np.abs(pi - [0.6, 0.4])) < 1e-12

    def test_identity_not_unique(self):
        with pytest.raises(NonUniqueInvariant):
            block_invariant_distribution(np.eye(2))
        with pytest.raises(NonUniqueInvariant):
            block_invariant_distribution(np.eye(3))

    def test_reducible_block(self):
        T = np.array([[0.5, 0.5, 0, 0], [0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5], [0, 0, 0.5, 0.5]])
        with pytest.raises(NonUniqueInvariant):
            block_invariant_distribution(T)

    def test_lu_against_eigenvector(self, rng):
        for _ in range(20):
            n = int(rng.integers(3, 10))
            T = rng.dirichlet(np.ones(n), size=n)
            vals, vecs = np.linalg.eig(T.T)
            ref = np.real(vecs[:, np.argmin(np.abs(vals - 1))])
            ref = ref / ref.sum()
            pi = block_invariant_distribution(T)
            assert np.max(np.abs(pi - ref)) < 1e-12
            assert np.abs(pi @ T - pi).sum() <= 1e-12

    def test_power_iteration_path(self, rng):
        n = 80
        T = rng.dirichlet(np.ones(n), size=n)
        pi = block_invariant_distribution(T)
        assert np.abs(pi @ T - pi).sum() <= 1e-12

    def test_block_kernel_extraction(self):
        T = effective_kernel(FIG2_PARAMS)
        assert np.allclose(block_kernel(T, DNA_PARTITION, 1), T.matrix[2:, 2:])


class TestPrimitive:
    def test_examples(self):
        assert is_primitive([[0.9, 0.1], [0.2, 0.8]])
        assert not is_primitive([[0, 1], [1, 0]])
        assert not is_primitive(np.eye(2))

    def test_needs_higher_power(self):
        # a 3-cycle plus one chord: aperiodic, but T itself has zeros
        T = np.array([[0, 1, 0], [0, 0, 1], [0.5, 0.5, 0]])
        assert is_primitive(T)

    def test_pure_cycle(self):
        assert not is_primitive(np.roll(np.eye(4), 1, axis=1))


def test_iterate_kernel_matches_stepwise(rng):
    T = np.array([[0.9, 0.1], [0.3, 0.7]])
    p = np.array([0.2, 0.8])
    q = p
    for _ in range(7):
        q = apply_kernel(q, T)
    assert np.array_equal(iterate_kernel(p, T, 7), q)
    assert np.array_equal(iterate_kernel(p, T, 0), p)
    with pytest.raises(ValueError):
        iterate_kernel(p, T, -1)
