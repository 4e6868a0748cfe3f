"""
Signed permutation algebra: group law, orders, cycle invariants and text format
"""

import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from core.errors import ParseError, PreconditionError
from core.signed_perm import (
    CycleType,
    SignedCycleType,
    SignedPermutation,
    all_signed_permutations,
    compose,
    count_odd_order_lifts,
    cycle_type,
    format_element,
    inverse,
    is_odd_order,
    order,
    parse_cycle_type,
    parse_element,
    power,
    project,
    signed_cycle_type,
)


@st.composite
def signed_perms(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    image = draw(st.permutations(list(range(1, n + 1))))
    sign = draw(st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n))
    return SignedPermutation(tuple(image), tuple(sign))


@st.composite
def signed_perm_pairs(draw, max_n=6):
    f = draw(signed_perms(max_n=max_n))
    image = draw(st.permutations(list(range(1, f.n + 1))))
    sign = draw(st.lists(st.sampled_from([1, -1]), min_size=f.n, max_size=f.n))
    return f, SignedPermutation(tuple(image), tuple(sign))


QUARTER_TURN = SignedPermutation((2, 1), (1, -1))  # e1 -> e2, e2 -> -e1


class TestCompose:
    """Group law agrees with matrix multiplication"""

    def test_identity_squared(self):
        """id3 . id3 = id3"""
        e = SignedPermutation.identity(3)
        assert compose(e, e) == e

    def test_swap_is_involution(self):
        """A plain transposition squares to the identity"""
        swap = SignedPermutation((2, 1), (1, 1))
        assert compose(swap, swap) == SignedPermutation.identity(2)

    def test_quarter_turn_squared(self):
        """e1 -> e2, e2 -> -e1 composed with itself is diag(-1, -1)"""
        assert compose(QUARTER_TURN, QUARTER_TURN) == SignedPermutation.diagonal([-1, -1])

    def test_dimension_mismatch(self):
        """Factors of different size are rejected"""
        with pytest.raises(PreconditionError):
            compose(SignedPermutation.identity(2), SignedPermutation.identity(3))

    @given(signed_perm_pairs(max_n=8))
    @hyp_settings(max_examples=150, deadline=None)
    def test_matches_matrix_product(self, pair):
        """matrix(f . g) = matrix(f) @ matrix(g)"""
        f, g = pair
        np.testing.assert_array_equal(compose(f, g).matrix(), f.matrix() @ g.matrix())

    @given(signed_perms(max_n=8))
    @hyp_settings(max_examples=100, deadline=None)
    def test_matrix_is_orthogonal(self, f):
        """Every element is an orthogonal integer matrix of determinant +-1"""
        m = f.matrix()
        np.testing.assert_array_equal(m @ m.T, np.eye(f.n, dtype=np.int64))
        assert round(abs(np.linalg.det(m))) == 1

    @given(signed_perms())
    @hyp_settings(max_examples=100, deadline=None)
    def test_inverse_is_transpose(self, f):
        """f^-1 is the transpose and composes to the identity"""
        np.testing.assert_array_equal(inverse(f).matrix(), f.matrix().T)
        assert compose(f, inverse(f)) == SignedPermutation.identity(f.n)


class TestOrder:
    """Order from signed cycle data"""

    def test_reflection(self):
        assert order(SignedPermutation.diagonal([-1, 1])) == 2

    def test_quarter_turn(self):
        """[[0,-1],[1,0]] has order 4"""
        assert order(QUARTER_TURN) == 4
        assert power(QUARTER_TURN, 4) == SignedPermutation.identity(2)
        assert power(QUARTER_TURN, 2) != SignedPermutation.identity(2)

    def test_plain_three_cycle(self):
        assert order(SignedPermutation.from_cycles(3, [[1, 2, 3]])) == 3

    def test_negative_three_cycle(self):
        """A 3-cycle carrying one -1 sign has order 6"""
        f = SignedPermutation.from_cycles(3, [[1, 2, 3]], signs=[1, 1, -1])
        assert order(f) == 6
        assert not is_odd_order(f)

    def test_order_by_powers_small_n(self):
        """Formula order equals the least k with f^k = id, exhaustively for n <= 3"""
        for n in range(1, 4):
            e = SignedPermutation.identity(n)
            for f in all_signed_permutations(n):
                k = order(f)
                assert power(f, k) == e, f"{f}: f^{k} != id"
                assert all(power(f, j) != e for j in range(1, k)), f"{f}: order below {k}"

    def test_order_divides_group_order(self):
        """order(f) divides 2^n n! and is odd iff is_odd_order, exhaustive for n <= 4"""
        for n in range(1, 5):
            group_order = 2 ** n * math.factorial(n)
            for f in all_signed_permutations(n):
                k = order(f)
                assert group_order % k == 0
                assert (k % 2 == 1) == is_odd_order(f), f"{f}: order {k}"


class TestCycleTypes:
    """Signed and unsigned cycle decompositions"""

    def test_signed_diagonal(self):
        """diag(-1,-1,1) has two odd-parity fixed points and one even"""
        sct = signed_cycle_type(SignedPermutation.diagonal([-1, -1, 1]))
        assert sct == SignedCycleType(((1, 1), (1, 1), (1, 0)))

    def test_signed_three_cycle(self):
        f = SignedPermutation.from_cycles(3, [[1, 2, 3]], signs=[-1, 1, 1])
        assert signed_cycle_type(f) == SignedCycleType(((3, 1),))
        assert order(f) == 6

    def test_identity_five(self):
        sct = signed_cycle_type(SignedPermutation.identity(5))
        assert sct.cycles == ((1, 0),) * 5
        assert sct.n == 5

    def test_project_drops_signs(self):
        f = SignedPermutation.from_cycles(4, [[1, 3]], signs=[-1, 1, -1, -1])
        p = project(f)
        assert p.image == f.image
        assert p.sign == (1, 1, 1, 1)
        assert cycle_type(p) == cycle_type(f) == CycleType((2, 1, 1))

    def test_cycle_type_counts(self):
        ct = CycleType.of([3, 3, 5], n=13)
        assert ct.n == 13
        assert ct.count(1) == 2
        assert ct.count(3) == 2
        assert ct.num_cycles == 5
        assert ct.order == 15
        assert ct.is_odd()

    def test_cycle_type_rejects_overfull(self):
        with pytest.raises(PreconditionError):
            CycleType.of([3, 5], n=7)

    @given(signed_perm_pairs(max_n=6))
    @hyp_settings(max_examples=200, deadline=None)
    def test_conjugacy_invariance(self, pair):
        """h f h^-1 has the signed cycle type of f"""
        f, h = pair
        conjugate = compose(compose(h, f), inverse(h))
        assert signed_cycle_type(conjugate) == signed_cycle_type(f)

    def test_classes_are_conjugacy_classes(self):
        """Equal signed cycle types are conjugate, brute force for n <= 3"""
        for n in range(1, 4):
            group = list(all_signed_permutations(n))
            orbits = {}
            for f in group:
                orbits[f] = frozenset(compose(compose(h, f), inverse(h)) for h in group)
            for f, g in itertools.combinations(group, 2):
                same_type = signed_cycle_type(f) == signed_cycle_type(g)
                assert same_type == (g in orbits[f]), f"{f} vs {g}"


class TestOddOrderLifts:
    """Odd-order signed lifts of odd permutations"""

    def test_identity(self):
        assert count_odd_order_lifts(CycleType.of([], n=3)) == 1

    def test_three_cycle(self):
        assert count_odd_order_lifts(CycleType((3,))) == 4

    def test_three_five(self):
        assert count_odd_order_lifts(CycleType((3, 5))) == 64

    def test_even_part_rejected(self):
        with pytest.raises(PreconditionError):
            count_odd_order_lifts(CycleType((2, 1)))

    def test_lifts_match_brute_force(self):
        """Lift counts per cycle type agree with all of O(n, Z), n <= 4"""
        for n in range(1, 5):
            observed = Counter(cycle_type(f) for f in all_signed_permutations(n) if is_odd_order(f))
            for ct, count in observed.items():
                perms = sum(1 for f in all_signed_permutations(n)
                            if f.sign == (1,) * n and cycle_type(f) == ct)
                assert count == perms * count_odd_order_lifts(ct), f"n={n}, {ct}"


class TestTextFormat:
    """Element and cycle-type line formats"""

    def test_parse_element(self):
        f = parse_element("3; 2,3,1; +,-,+")
        assert f.image == (2, 3, 1)
        assert f.sign == (1, -1, 1)

    def test_format_parse_inverse(self):
        f = SignedPermutation((3, 1, 2, 4), (-1, 1, 1, -1))
        assert format_element(f) == "4; 3,1,2,4; -,+,+,-"
        assert parse_element(format_element(f)) == f

    @pytest.mark.parametrize("text", [
        "3; 1,2,3",
        "3; 1,2; +,+,+",
        "3; 1,2,3; +,*,+",
        "x; 1; +",
    ])
    def test_malformed_element(self, text):
        with pytest.raises(ParseError):
            parse_element(text)

    def test_non_bijection(self):
        with pytest.raises(PreconditionError):
            parse_element("3; 1,1,2; +,+,+")

    def test_parse_cycle_type(self):
        assert parse_cycle_type("3,5,7").parts == (7, 5, 3)
        assert parse_cycle_type("3, 5", n=10).count(1) == 2

    def test_bad_cycle_type(self):
        with pytest.raises(ParseError):
            parse_cycle_type("3,x")
        with pytest.raises(ParseError):
            parse_cycle_type("")
