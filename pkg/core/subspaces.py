"""
Subgroups of the diagonal group G_n, viewed as subspaces of F2^n

Vectors are Python ints: bit i-1 holds coordinate i, so the Hamming
weight of an element is int.bit_count() and its length l(phi) is the
number of -1 entries of the diagonal matrix.

Bases are kept in reduced row-echelon form with the pivot of each row at
its lowest set coordinate; rows are ordered by pivot.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from core.errors import InvariantViolation, ParseError, PreconditionError
from core.verdict import Verdict, Witness

logger = logging.getLogger('Nielsen.Subspaces')

# Rank-k canonical forms search GL_k(F2); 20160 matrices at k = 4
MAX_GL_RANK = 4
MAX_PERMUTATION_N = 8
EXHAUSTIVE_SHORT_RANK = 20


def weight(v: int) -> int:
    return v.bit_count()


def rref(vectors: Iterable[int]) -> Tuple[int, ...]:
    """
    Reduced row-echelon basis of the span of vectors

    Args:
        vectors: Integers encoding F2 vectors

    Returns:
        Tuple of rows sorted by pivot (lowest set bit)
    """
    rows: List[Tuple[int, int]] = []  # (pivot bit, row)
    for v in vectors:
        for p, row in rows:
            if (v >> p) & 1:
                v ^= row
        if not v:
            continue
        p = (v & -v).bit_length() - 1
        rows = [(q, row ^ v if (row >> p) & 1 else row) for q, row in rows]
        rows.append((p, v))
    rows.sort()
    return tuple(row for _, row in rows)


def vector_to_text(v: int, n: int) -> str:
    """0/1 string with coordinate 1 leftmost"""
    return "".join('1' if (v >> i) & 1 else '0' for i in range(n))


def text_to_vector(text: str) -> int:
    text = text.strip()
    if not text or any(ch not in '01' for ch in text):
        raise ParseError(f"Row '{text}' is not a 0/1 string")
    return sum(1 << i for i, ch in enumerate(text) if ch == '1')


def vector_to_word(v: int) -> str:
    """Product notation e1e3 for the vector with coordinates 1 and 3"""
    if not v:
        return "1"
    return "".join(f"e{i + 1}" for i in range(v.bit_length()) if (v >> i) & 1)


@dataclass(frozen=True)
class Subspace2:
    """Subspace of F2^n in canonical reduced echelon form"""
    n: int
    basis: Tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise PreconditionError("Ambient dimension must be >= 0")
        if any(v < 0 or v >> self.n for v in self.basis):
            raise PreconditionError(f"Vector outside F2^{self.n}")
        object.__setattr__(self, 'basis', rref(self.basis))

    @classmethod
    def span(cls, n: int, vectors: Iterable[int]) -> "Subspace2":
        return cls(n, tuple(vectors))

    @classmethod
    def zero(cls, n: int) -> "Subspace2":
        return cls(n, ())

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "Subspace2":
        """Build from 0/1 text rows of equal length"""
        rows = [r.strip() for r in rows if r.strip() and not r.strip().startswith('#')]
        if not rows:
            raise ParseError("No rows given")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ParseError("Rows have different lengths")
        return cls(n, tuple(text_to_vector(r) for r in rows))

    @classmethod
    def from_words(cls, n: int, words: Sequence[str]) -> "Subspace2":
        """Build from product words such as 'e1', 'e2e3'"""
        vectors = []
        for word in words:
            indices = [int(tok) for tok in word.split('e') if tok]
            vectors.append(sum(1 << (i - 1) for i in indices))
        return cls(n, tuple(vectors))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple((v & -v).bit_length() - 1 for v in self.basis)

    def elements(self) -> Iterator[int]:
        """All 2^rank elements, zero first"""
        for mask in range(1 << self.rank):
            v = 0
            for i, row in enumerate(self.basis):
                if (mask >> i) & 1:
                    v ^= row
            yield v

    def contains(self, v: int) -> bool:
        for row in self.basis:
            if (v >> ((row & -row).bit_length() - 1)) & 1:
                v ^= row
        return v == 0

    def rows(self) -> List[str]:
        return [vector_to_text(v, self.n) for v in self.basis]

    def describe(self) -> str:
        return "<" + ", ".join(vector_to_word(v) for v in self.basis) + ">"

    def to_dict(self) -> Dict:
        return {"n": self.n, "rank": self.rank, "rows": self.rows(), "generators": self.describe()}


def has_even_element(H: Subspace2) -> bool:
    """Some nonzero element has even weight"""
    if H.rank >= 2:
        return True
    return H.rank == 1 and weight(H.basis[0]) % 2 == 0


def parity_functional_on(H: Subspace2) -> str:
    """'zero' when every element has even weight, else 'nonzero'"""
    return "nonzero" if any(weight(v) % 2 for v in H.basis) else "zero"


def find_even_element(H: Subspace2) -> Optional[int]:
    """A nonzero even-weight element, if any"""
    odd = [v for v in H.basis if weight(v) % 2]
    even = [v for v in H.basis if weight(v) % 2 == 0]
    if even:
        return even[0]
    if len(odd) >= 2:
        return odd[0] ^ odd[1]
    return None


def find_short_element(H: Subspace2) -> int:
    """
    Nonzero element of weight at most 2n/3

    Args:
        H: Subspace of rank >= 2

    Returns:
        Minimum-weight element (smallest encoding on ties) for rank <= 20,
        otherwise the lightest of the first two basis rows and their sum
    """
    if H.rank < 2:
        raise PreconditionError(f"find_short_element needs rank >= 2, got {H.rank}")
    if H.rank <= EXHAUSTIVE_SHORT_RANK:
        best = min((v for v in H.elements() if v), key=lambda v: (weight(v), v))
    else:
        phi, psi = H.basis[0], H.basis[1]
        best = min((phi, psi, phi ^ psi), key=lambda v: (weight(v), v))
    if 3 * weight(best) > 2 * H.n:
        raise InvariantViolation(f"No element of weight <= 2n/3 found in {H.describe()}")
    return best


@lru_cache(maxsize=None)
def gaussian_binomial(n: int, k: int) -> int:
    """Number of k-dimensional subspaces of F2^n"""
    if k < 0 or k > n:
        return 0
    num, den = 1, 1
    for i in range(k):
        num *= (1 << (n - i)) - 1
        den *= (1 << (k - i)) - 1
    return num // den


@lru_cache(maxsize=None)
def galois_number(n: int) -> int:
    """Total number of subspaces of F2^n"""
    return sum(gaussian_binomial(n, k) for k in range(n + 1))


def even_subspace_count(n: int, k: int) -> int:
    """k-dimensional subspaces inside the even-weight hyperplane"""
    if n < 1:
        raise PreconditionError("even_subspace_count needs n >= 1")
    return gaussian_binomial(n - 1, k)


def even_proportion(n: int, k: int) -> Fraction:
    """
    Proportion of rank-k subgroups of G_n with all elements of even weight

    Returns:
        Exact fraction, checked against (2^(n-k) - 1) / (2^n - 1)
    """
    if n < 1 or k < 0 or k > n:
        raise PreconditionError(f"even_proportion needs 0 <= k <= n, n >= 1; got n={n}, k={k}")
    value = Fraction(even_subspace_count(n, k), gaussian_binomial(n, k))
    closed = Fraction((1 << (n - k)) - 1, (1 << n) - 1)
    if value != closed:
        raise InvariantViolation(f"even_proportion({n},{k}) = {value} but closed form gives {closed}")
    return value


def limit_check(k: int, n: int = 60) -> Dict[str, float]:
    """Compare even_proportion(n, k) with its limit 2^-k"""
    value = even_proportion(n, k)
    limit = Fraction(1, 1 << k)
    return {
        "n": n,
        "k": k,
        "proportion": float(value),
        "limit": float(limit),
        "relative_error": float(abs(value - limit) / limit),
    }


def small_rank_proportion(n: int) -> Fraction:
    """Exact share of subgroups of G_n with rank <= log2 n"""
    ranks = [k for k in range(n + 1) if (1 << k) <= n]
    return Fraction(sum(gaussian_binomial(n, k) for k in ranks), galois_number(n))


def _columns(H: Subspace2) -> List[int]:
    """Column j of the generator matrix as a rank-bit integer"""
    return [sum(1 << i for i, row in enumerate(H.basis) if (row >> j) & 1) for j in range(H.n)]


@lru_cache(maxsize=None)
def _general_linear(k: int) -> Tuple[Tuple[int, ...], ...]:
    """GL_k(F2) as tuples of images of the unit vectors"""
    result = []

    def extend(images: List[int]) -> None:
        if len(images) == k:
            result.append(tuple(images))
            return
        span = set()
        for mask in range(1 << len(images)):
            v = 0
            for i, img in enumerate(images):
                if (mask >> i) & 1:
                    v ^= img
            span.add(v)
        for candidate in range(1, 1 << k):
            if candidate not in span:
                extend(images + [candidate])

    extend([])
    return tuple(result)


def _apply(images: Tuple[int, ...], c: int) -> int:
    v = 0
    for i, img in enumerate(images):
        if (c >> i) & 1:
            v ^= img
    return v


def canonical_key(H: Subspace2) -> Tuple:
    """
    Permutation-equivalence invariant that separates classes

    Two subspaces differ by a coordinate permutation iff their column
    multisets differ by an invertible change of basis, so the minimal sorted
    column tuple over GL_k(F2) is a complete invariant.
    """
    k = H.rank
    if k == 0:
        return (H.n, 0, (0,) * H.n)
    cols = _columns(H)
    if k <= MAX_GL_RANK:
        best = min(tuple(sorted(_apply(A, c) for c in cols)) for A in _general_linear(k))
        return (H.n, k, best)
    if H.n <= MAX_PERMUTATION_N:
        best = min(
            rref(sum(((row >> perm[j]) & 1) << j for j in range(H.n)) for row in H.basis)
            for perm in itertools.permutations(range(H.n))
        )
        return (H.n, k, ('perm',) + best)
    raise PreconditionError(
        f"Permutation-equivalence needs rank <= {MAX_GL_RANK} or n <= {MAX_PERMUTATION_N}"
    )


def canonical_form(H: Subspace2) -> Subspace2:
    """Representative of the permutation-equivalence class of H"""
    key = canonical_key(H)
    n, k, cols = key
    if k == 0:
        return Subspace2.zero(n)
    if cols and cols[0] == 'perm':
        return Subspace2(n, cols[1:])
    rows = [sum(1 << j for j, c in enumerate(cols) if (c >> i) & 1) for i in range(k)]
    return Subspace2(n, tuple(rows))


def equivalent(H: Subspace2, K: Subspace2) -> bool:
    if H.n != K.n or H.rank != K.rank:
        return False
    return canonical_key(H) == canonical_key(K)


def _diagonal_input(H: Subspace2) -> Dict:
    return {"kind": "diagonal", "n": H.n, "rank": H.rank, "rows": H.rows()}


def verdict_diagonal(H: Subspace2, n: int = None, hinge_scope: str = "hub") -> Verdict:
    """
    Realizability verdict for a subgroup of G_n

    Args:
        H: The subgroup
        n: Ambient size (defaults to H.n; must agree)
        hinge_scope: CP2-tree catalog convention for rank 3

    Returns:
        Verdict with CP2-tree certificate or the single rule that fired
    """
    from core.cp2_trees import rank3_catalog, realize_rank2, realized_subgroup

    if n is not None and n != H.n:
        raise PreconditionError(f"Subspace lives in F2^{H.n}, not F2^{n}")
    n = H.n
    rank = H.rank
    info = _diagonal_input(H)

    if rank <= 2:
        tree, generators = realize_rank2(H)
        if realized_subgroup(tree, generators) != H:
            raise InvariantViolation(f"realize_rank2 certificate does not reproduce {H.describe()}")
        return Verdict.realizable(
            {"kind": "cp2_tree", "tree": tree.to_dict(), "generators": list(generators)},
            info,
            [Witness("rank_at_most_2", {"rank": rank}, "two-generated diagonal subgroups are realizable")],
        )

    if rank == 3:
        catalog = rank3_catalog(n, hinge_scope=hinge_scope)
        entry = catalog.get(canonical_key(H))
        if entry is not None:
            return Verdict.realizable(
                {"kind": "cp2_tree", "tree": entry.tree.to_dict(), "generators": list(entry.generators),
                 "catalog_class": entry.subspace.describe()},
                info,
                [Witness("rank3_catalog", {"class": entry.subspace.describe()},
                         "CP2-tree construction realizes this rank-3 class")],
            )
        logger.debug(f"Rank-3 subgroup {H.describe()} not in the n={n} catalog")
        return Verdict.unknown(info)

    if n % 2 == 1:
        phi = find_even_element(H)
        if phi is None:
            raise InvariantViolation("Rank >= 2 subspace without even element")
        return Verdict.not_realizable(
            [Witness("odd_n_rank_ge_4",
                     {"rank": rank, "n": n, "element": vector_to_text(phi, n), "complement_weight": n - weight(phi)},
                     "rank >= 4 diagonal subgroups are not realizable for odd n")],
            info,
        )

    odd = [v for v in H.basis if weight(v) % 2]
    if odd:
        phi = odd[0]
        return Verdict.not_realizable(
            [Witness("odd_complement_weight",
                     {"rank": rank, "element": vector_to_text(phi, n), "complement_weight": n - weight(phi)},
                     "rank >= 4 with an element phi of odd n - l(phi) is not realizable")],
            info,
        )

    if (1 << rank) > n * (1 << 8):
        return Verdict.not_realizable(
            [Witness("rank_exceeds_log_bound", {"rank": rank, "bound": f"8 + log2({n})"},
                     "rank above 8 + log2 n is not realizable")],
            info,
        )

    return Verdict.unknown(info)
