"""
Brute-force enumerators and their caps
"""

import pytest

from core import oracle
from core.errors import OracleLimitError, PreconditionError
from core.signed_perm import CycleType, SignedPermutation, all_signed_permutations
from core.subspaces import gaussian_binomial, galois_number


class TestOddOrderCensus:
    """Odd-order permutations counted by walking S_n"""

    def test_n4(self):
        census = oracle.enum_odd_order(4)
        assert census.count == 9
        assert census.distribution == {CycleType((1, 1, 1, 1)): 1, CycleType((3, 1)): 8}

    def test_n2(self):
        assert oracle.enum_odd_order(2).count == 1

    def test_n0(self):
        assert oracle.enum_odd_order(0).count == 1

    @pytest.mark.parametrize("n", range(1, 8))
    def test_strategies_agree(self, n):
        assert oracle.enum_odd_order(n, "iterate") == oracle.enum_odd_order(n, "classes")

    def test_parallel_iteration(self):
        assert oracle.enum_odd_order(6, jobs=2) == oracle.enum_odd_order(6)

    def test_to_dict(self):
        record = oracle.enum_odd_order(3).to_dict()
        assert record == {"n": 3, "count": 3, "distribution": {"1,1,1": 1, "3": 2}}

    def test_unknown_strategy(self):
        with pytest.raises(PreconditionError):
            oracle.enum_odd_order(3, strategy="guess")

    def test_cap(self):
        with pytest.raises(OracleLimitError):
            oracle.enum_odd_order(oracle.MAX_ODD_ORDER_N + 1)


class TestSignedOddOrder:
    def test_small(self):
        assert [oracle.enum_signed_odd_order(n) for n in range(4)] == [1, 1, 1, 9]

    def test_cap(self):
        with pytest.raises(OracleLimitError):
            oracle.enum_signed_odd_order(oracle.MAX_SIGNED_N + 1)


class TestSubspaceEnumeration:
    """Reduced echelon forms cover every subspace once"""

    def test_total_n3(self):
        assert len(list(oracle.enum_subspaces(3))) == 16 == galois_number(3)

    @pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (5, 3), (6, 1)])
    def test_rank_counts(self, n, k):
        subspaces = list(oracle.enum_subspaces(n, k))
        assert len(subspaces) == gaussian_binomial(n, k)
        assert len(set(subspaces)) == len(subspaces)
        assert all(H.rank == k for H in subspaces)

    def test_even_subspaces(self):
        assert len(list(oracle.enum_even_subspaces(4, 2))) == 7

    def test_rank_out_of_range(self):
        assert list(oracle.enum_subspaces(3, 5)) == []

    def test_cap(self):
        with pytest.raises(OracleLimitError):
            list(oracle.enum_subspaces(oracle.MAX_SUBSPACE_N + 1))


class TestPartitions:
    def test_counts(self):
        assert len(oracle.enum_partitions(5, oracle.odd_parts)) == 3
        assert oracle.enum_partitions(9, oracle.odd_parts_ge3) == [(9,), (3, 3, 3)]
        assert oracle.enum_partitions(0) == [()]

    def test_all_partitions_of_ten(self):
        assert len(oracle.enum_partitions(10)) == 42

    def test_decreasing_tuples(self):
        assert all(list(p) == sorted(p, reverse=True) for p in oracle.enum_partitions(12))

    def test_cap(self):
        with pytest.raises(OracleLimitError):
            oracle.enum_partitions(oracle.MAX_PARTITION_N + 1)

    def test_negative(self):
        with pytest.raises(PreconditionError):
            oracle.enum_partitions(-1)


class TestMinGeneratingSet:
    """Smallest generating subsets by exhaustion"""

    def test_trivial(self):
        assert oracle.min_generating_set_size([SignedPermutation.identity(3)]) == 0

    def test_cyclic(self):
        c = SignedPermutation.from_cycles(3, [[1, 2, 3]])
        elements = [SignedPermutation.identity(3), c, SignedPermutation.from_cycles(3, [[1, 3, 2]])]
        assert oracle.min_generating_set_size(elements) == 1

    def test_klein_four(self):
        elements = [SignedPermutation.diagonal(d) for d in ([1, 1], [-1, 1], [1, -1], [-1, -1])]
        assert oracle.min_generating_set_size(elements) == 2

    def test_symmetric_group(self):
        elements = [f for f in all_signed_permutations(3) if f.sign == (1, 1, 1)]
        assert len(elements) == 6
        assert oracle.min_generating_set_size(elements) == 2

    def test_not_a_group(self):
        with pytest.raises(PreconditionError):
            oracle.min_generating_set_size([SignedPermutation.from_cycles(3, [[1, 2, 3]])])

    def test_empty(self):
        with pytest.raises(PreconditionError):
            oracle.min_generating_set_size([])
