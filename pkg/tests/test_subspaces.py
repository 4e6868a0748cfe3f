"""
Diagonal subgroups: echelon forms, subspace counting and the rank verdict
"""

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings as hyp_settings, strategies as st

from core import oracle
from core.errors import ParseError, PreconditionError
from core.subspaces import (
    Subspace2,
    canonical_form,
    canonical_key,
    equivalent,
    even_proportion,
    even_subspace_count,
    find_even_element,
    find_short_element,
    galois_number,
    gaussian_binomial,
    has_even_element,
    limit_check,
    parity_functional_on,
    rref,
    small_rank_proportion,
    text_to_vector,
    verdict_diagonal,
    weight,
)
from core.verdict import Status


def unit(i: int) -> int:
    return 1 << (i - 1)


@st.composite
def subspaces(draw, min_n=1, max_n=10, min_rank=0):
    n = draw(st.integers(min_value=max(min_n, min_rank), max_value=max_n))
    vectors = draw(st.lists(st.integers(min_value=1, max_value=(1 << n) - 1), min_size=min_rank, max_size=n))
    H = Subspace2.span(n, vectors)
    if H.rank < min_rank:
        H = Subspace2.span(n, vectors + [unit(i) for i in range(1, min_rank + 1)])
    return H


class TestEchelonForm:
    """Canonical reduced row-echelon representation"""

    def test_weight(self):
        assert weight(text_to_vector("10110")) == 3

    def test_rref_is_canonical(self):
        """Different spanning sets of one subspace give identical bases"""
        a = Subspace2.from_rows(["1100", "0110"])
        b = Subspace2.from_rows(["1010", "0110", "1100"])
        assert a == b
        assert a.rank == 2

    @given(subspaces())
    @hyp_settings(max_examples=100, deadline=None)
    def test_pivot_structure(self, H):
        """Pivots strictly increase and each pivot column holds a single 1"""
        pivots = H.pivots
        assert list(pivots) == sorted(set(pivots))
        for p in pivots:
            assert sum((row >> p) & 1 for row in H.basis) == 1

    @given(subspaces(max_n=9))
    @hyp_settings(max_examples=60, deadline=None)
    def test_elements_are_distinct(self, H):
        elements = list(H.elements())
        assert len(set(elements)) == len(elements) == 2 ** H.rank
        assert all(H.contains(v) for v in elements)

    def test_from_words(self):
        H = Subspace2.from_words(5, ["e1e2", "e3e4"])
        assert H.rows() == ["11000", "00110"]

    def test_bad_rows(self):
        with pytest.raises(ParseError):
            Subspace2.from_rows(["101", "10"])
        with pytest.raises(ParseError):
            Subspace2.from_rows(["1021"])

    def test_vector_outside_ambient_space(self):
        with pytest.raises(PreconditionError):
            Subspace2(3, (0b1000,))


class TestEvenElements:
    """Weight parity and short elements"""

    def test_two_even_generators(self):
        assert has_even_element(Subspace2.from_rows(["11000", "00110"]))

    def test_single_odd_generator(self):
        assert not has_even_element(Subspace2.from_rows(["10000"]))

    def test_parity_functional(self):
        assert parity_functional_on(Subspace2.from_rows(["1100", "0011"])) == "zero"
        assert parity_functional_on(Subspace2.from_rows(["1000", "0011"])) == "nonzero"

    @given(subspaces(min_n=3, max_n=11, min_rank=2).filter(lambda H: H.n % 2 == 1))
    @hyp_settings(max_examples=80, deadline=None)
    def test_odd_n_rank_two_has_even_element(self, H):
        phi = find_even_element(H)
        assert phi is not None and phi != 0
        assert weight(phi) % 2 == 0
        assert H.contains(phi)

    def test_short_element_from_pair(self):
        """<111111, 111000> in n = 6 has an element of weight 3"""
        H = Subspace2.from_rows(["111111", "111000"])
        phi = find_short_element(H)
        assert weight(phi) == 3
        assert H.contains(phi)

    def test_short_element_of_units(self):
        assert find_short_element(Subspace2.span(5, [unit(1), unit(2)])) == unit(1)

    @given(st.lists(st.integers(min_value=1, max_value=(1 << 9) - 1), min_size=2, max_size=2, unique=True))
    @hyp_settings(max_examples=60, deadline=None)
    def test_short_element_bound(self, pair):
        """Returned weight is at most 2n/3 and matches the exhaustive minimum"""
        H = Subspace2.span(9, pair)
        assert H.rank == 2
        phi = find_short_element(H)
        assert 3 * weight(phi) <= 2 * H.n
        assert weight(phi) == min(weight(v) for v in H.elements() if v)

    def test_rank_one_rejected(self):
        with pytest.raises(PreconditionError):
            find_short_element(Subspace2.from_rows(["111"]))


class TestCounting:
    """Gaussian binomials and even proportions against brute force"""

    @pytest.mark.parametrize("n,k,expected", [(2, 1, 3), (4, 2, 35), (3, 0, 1), (3, 4, 0)])
    def test_gaussian_binomial(self, n, k, expected):
        assert gaussian_binomial(n, k) == expected

    def test_galois_number(self):
        assert galois_number(3) == 16

    def test_matches_sympy_q_binomial(self):
        """Product formula agrees with the q-binomial evaluated at q = 2"""
        q = sympy.Symbol('q')
        for n in range(1, 9):
            for k in range(n + 1):
                expr = sympy.sympify(sympy.prod([(1 - q ** (n - i)) / (1 - q ** (i + 1)) for i in range(k)]))
                assert expr.subs(q, 2) == gaussian_binomial(n, k)

    @pytest.mark.parametrize("n,k,expected", [(4, 1, Fraction(7, 15)), (4, 2, Fraction(1, 5))])
    def test_even_proportion(self, n, k, expected):
        assert even_proportion(n, k) == expected

    def test_even_count_rank_zero(self):
        assert all(even_subspace_count(n, 0) == 1 for n in range(1, 10))

    def test_against_oracle(self):
        """Counts equal oracle enumeration of echelon bases for n <= 6"""
        for n in range(1, 7):
            assert galois_number(n) == sum(1 for _ in oracle.enum_subspaces(n))
            for k in range(n + 1):
                assert gaussian_binomial(n, k) == sum(1 for _ in oracle.enum_subspaces(n, k))
                assert even_subspace_count(n, k) == sum(1 for _ in oracle.enum_even_subspaces(n, k))

    @pytest.mark.slow
    def test_against_oracle_n8(self):
        assert galois_number(8) == sum(1 for _ in oracle.enum_subspaces(8))

    @pytest.mark.parametrize("k", range(1, 9))
    def test_limit(self, k):
        """even_proportion(60, k) is within 1% of 2^-k"""
        check = limit_check(k, 60)
        assert check["relative_error"] < 0.01
        previous = abs(even_proportion(40, k) - Fraction(1, 2 ** k))
        assert abs(even_proportion(60, k) - Fraction(1, 2 ** k)) <= previous


class TestSmallRankShare:
    """Share of subgroups of rank <= log2 n"""

    def test_n4(self):
        assert small_rank_proportion(4) == Fraction(1 + 15 + 35, 67)

    def test_decays(self):
        shares = [small_rank_proportion(n) for n in (8, 16, 32)]
        assert shares[0] > shares[1] > shares[2]
        assert shares[2] * 32 < 1


class TestEquivalence:
    """Permutation-equivalence of subspaces"""

    def test_coordinate_permutation(self):
        H = Subspace2.from_rows(["1100", "0011"])
        K = Subspace2.from_rows(["1010", "0101"])
        assert equivalent(H, K)

    def test_inequivalent(self):
        H = Subspace2.from_rows(["1100", "0011"])
        K = Subspace2.from_rows(["1000", "0100"])
        assert not equivalent(H, K)

    def test_key_invariant_under_rref(self):
        rows = [0b10110, 0b01101, 0b11011]
        assert canonical_key(Subspace2.span(5, rows)) == canonical_key(Subspace2(5, rref(rows)))

    def test_canonical_form_picks_one_representative(self):
        H = Subspace2.from_rows(["11100", "00111"])
        K = Subspace2.from_rows(["10101", "01110"])
        assert equivalent(H, K)
        assert canonical_form(H) == canonical_form(K)
        assert equivalent(canonical_form(H), H)

    def test_canonical_forms_count_classes(self):
        """Rank-2 subspaces of F2^4 fall into 6 permutation classes"""
        forms = {canonical_form(H) for H in oracle.enum_subspaces(4, 2)}
        assert len(forms) == 6


class TestVerdictDiagonal:
    """Realizability of diagonal subgroups by rank"""

    def test_rank_one_realizable(self):
        for n in (2, 5, 8):
            verdict = verdict_diagonal(Subspace2.span(n, [unit(1) | unit(2)]))
            assert verdict.status == Status.REALIZABLE
            assert verdict.certificate["kind"] == "cp2_tree"

    def test_rank_four_odd_n(self):
        H = Subspace2.span(5, [unit(1), unit(2), unit(3), unit(4)])
        verdict = verdict_diagonal(H)
        assert verdict.status == Status.NOT_REALIZABLE
        assert verdict.rules == ["odd_n_rank_ge_4"]

    def test_rank_four_odd_complement(self):
        """e1 in n = 6 has n - l = 5 odd"""
        H = Subspace2.span(6, [unit(1), unit(2), unit(3), unit(4)])
        verdict = verdict_diagonal(H)
        assert verdict.status == Status.NOT_REALIZABLE
        assert verdict.rules == ["odd_complement_weight"]
        assert verdict.witnesses[0].data["complement_weight"] % 2 == 1

    def test_rank_above_log_bound(self):
        """Rank 13 of even vectors in n = 20 exceeds 8 + log2 20"""
        H = Subspace2.span(20, [unit(1) | unit(j) for j in range(2, 15)])
        assert H.rank == 13
        verdict = verdict_diagonal(H)
        assert verdict.rules == ["rank_exceeds_log_bound"]

    def test_unknown_region(self):
        """Rank 4, n even, every element even, below the bound"""
        H = Subspace2.span(8, [unit(1) | unit(2), unit(3) | unit(4), unit(5) | unit(6), unit(7) | unit(8)])
        assert verdict_diagonal(H).status == Status.UNKNOWN

    def test_rank_three_catalog(self):
        """The all-hinge star on (center, M_X, M_Y, M_Z) is in the n = 4 catalog"""
        H = Subspace2.from_rows(["0011", "0101", "1000"])
        verdict = verdict_diagonal(H)
        assert verdict.status == Status.REALIZABLE
        assert "catalog_class" in verdict.certificate

    def test_rank_three_outside_catalog(self):
        """Rank 3 in n = 3 is the whole of G_3"""
        verdict = verdict_diagonal(Subspace2.span(3, [unit(1), unit(2), unit(3)]))
        assert verdict.status in (Status.REALIZABLE, Status.UNKNOWN)
        assert not verdict.rules or verdict.rules == ["rank3_catalog"]

    def test_mismatched_n(self):
        with pytest.raises(PreconditionError):
            verdict_diagonal(Subspace2.zero(3), n=4)

    @given(subspaces(max_n=8))
    @hyp_settings(max_examples=80, deadline=None)
    def test_single_status(self, H):
        """Realizable verdicts carry no rules of exclusion and vice versa"""
        verdict = verdict_diagonal(H)
        if verdict.status == Status.REALIZABLE:
            assert verdict.certificate is not None
        if verdict.status == Status.NOT_REALIZABLE:
            assert len(verdict.witnesses) == 1
        if H.rank <= 2:
            assert verdict.status == Status.REALIZABLE
