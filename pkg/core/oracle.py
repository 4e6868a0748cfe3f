"""
Brute-force ground truth for small instances

Everything here is computed by exhaustive enumeration and deliberately
avoids the closed formulas and tables of the analytic modules, so tests can
compare the two. Each enumerator has a hard size cap; exceeding it raises
OracleLimitError instead of truncating.
"""

import itertools
import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from core.errors import OracleLimitError, PreconditionError
from core.signed_perm import CycleType, SignedPermutation
from core.subspaces import Subspace2

logger = logging.getLogger('Nielsen.Oracle')

MAX_ODD_ORDER_N = 9
MAX_SIGNED_N = 8
MAX_SUBSPACE_N = 8
MAX_PARTITION_N = 60
MAX_GENERATING_ORDER = 256

ODD_ORDER_STRATEGIES = ("iterate", "classes")

Partition = Tuple[int, ...]


def _require(value: int, cap: int, what: str) -> None:
    if value < 0:
        raise PreconditionError(f"{what} needs a non-negative size, got {value}")
    if value > cap:
        raise OracleLimitError(f"{what} is capped at {cap}, got {value}")


# ----------------------------------------------------------------------------
# Permutations
# ----------------------------------------------------------------------------

def _cycle_lengths(image: Sequence[int]) -> List[int]:
    seen = [False] * len(image)
    lengths = []
    for start in range(len(image)):
        if seen[start]:
            continue
        length, x = 0, start
        while not seen[x]:
            seen[x] = True
            x = image[x]
            length += 1
        lengths.append(length)
    return lengths


@dataclass(frozen=True)
class OddOrderCensus:
    n: int
    count: int
    distribution: Dict[CycleType, int]

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "count": self.count,
            "distribution": {str(ct): c for ct, c in sorted(self.distribution.items(), key=lambda kv: kv[0].parts)},
        }


def _census_chunk(n: int, first: int) -> Counter:
    """Odd-order permutations of 0..n-1 with image[0] == first"""
    counts: Counter = Counter()
    rest = [x for x in range(n) if x != first]
    for tail in itertools.permutations(rest):
        lengths = _cycle_lengths((first,) + tail)
        if all(k % 2 for k in lengths):
            counts[tuple(sorted(lengths, reverse=True))] += 1
    return counts


def _census_by_iteration(n: int, jobs: int) -> Counter:
    if n == 0:
        return Counter({(): 1})
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            chunks = list(executor.map(_census_chunk, [n] * n, range(n)))
    else:
        chunks = [_census_chunk(n, first) for first in range(n)]
    total: Counter = Counter()
    for chunk in chunks:
        total.update(chunk)
    return total


def _census_by_classes(n: int) -> Counter:
    counts: Counter = Counter()
    for parts in enum_partitions(n, odd_parts):
        size = math.factorial(n)
        for k, c in Counter(parts).items():
            size //= k ** c * math.factorial(c)
        counts[parts] = size
    return counts


def enum_odd_order(n: int, strategy: str = "iterate", jobs: int = 1) -> OddOrderCensus:
    """
    Odd-order permutations of n letters with their cycle-type distribution

    Args:
        n: Letters, at most MAX_ODD_ORDER_N
        strategy: 'iterate' walks all of S_n; 'classes' sums class sizes
            n! / prod k^c_k c_k! over odd partitions
        jobs: Worker processes for 'iterate'
    """
    _require(n, MAX_ODD_ORDER_N, "enum_odd_order")
    if strategy == "iterate":
        counts = _census_by_iteration(n, jobs)
    elif strategy == "classes":
        counts = _census_by_classes(n)
    else:
        raise PreconditionError(f"Unknown strategy '{strategy}', expected one of {ODD_ORDER_STRATEGIES}")
    distribution = {CycleType(parts): c for parts, c in counts.items() if parts}
    return OddOrderCensus(n, sum(counts.values()), distribution)


def _signed_order(image: Sequence[int], sign: Sequence[int]) -> int:
    """Order by repeated composition with the starting element"""
    n = len(image)
    cur_image, cur_sign = list(image), list(sign)
    order = 1
    while cur_image != list(range(n)) or any(s != 1 for s in cur_sign):
        # f o cur: e_i -> cur_sign[i] e_{cur_image[i]} -> cur_sign[i] sign[..] e_{image[..]}
        cur_sign = [cur_sign[i] * sign[cur_image[i]] for i in range(n)]
        cur_image = [image[cur_image[i]] for i in range(n)]
        order += 1
    return order


def _signed_chunk(n: int, first: int) -> int:
    count = 0
    rest = [x for x in range(n) if x != first]
    for tail in itertools.permutations(rest):
        image = (first,) + tail
        if any(k % 2 == 0 for k in _cycle_lengths(image)):
            continue
        for sign in itertools.product((1, -1), repeat=n):
            if _signed_order(image, sign) % 2:
                count += 1
    return count


def enum_signed_odd_order(n: int, jobs: int = 1) -> int:
    """Odd-order elements of O(n, Z), counted over all 2^n n! signed permutations"""
    _require(n, MAX_SIGNED_N, "enum_signed_odd_order")
    if n == 0:
        return 1
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            return sum(executor.map(_signed_chunk, [n] * n, range(n)))
    return sum(_signed_chunk(n, first) for first in range(n))


# ----------------------------------------------------------------------------
# Subspaces
# ----------------------------------------------------------------------------

def _subspaces_of_rank(n: int, k: int) -> Iterator[Subspace2]:
    """Reduced echelon forms: pivot positions, then every filling of the free entries"""
    for pivots in itertools.combinations(range(n), k):
        pivot_set = set(pivots)
        free = [[j for j in range(p + 1, n) if j not in pivot_set] for p in pivots]
        slots = [(row, j) for row, columns in enumerate(free) for j in columns]
        for bits in itertools.product((0, 1), repeat=len(slots)):
            rows = [1 << p for p in pivots]
            for (row, j), bit in zip(slots, bits):
                if bit:
                    rows[row] |= 1 << j
            yield Subspace2(n, tuple(rows))


def enum_subspaces(n: int, k: Optional[int] = None) -> Iterator[Subspace2]:
    """Every subspace of F2^n, or those of rank k"""
    _require(n, MAX_SUBSPACE_N, "enum_subspaces")
    ranks = range(n + 1) if k is None else [k]
    for rank in ranks:
        if 0 <= rank <= n:
            yield from _subspaces_of_rank(n, rank)


def enum_even_subspaces(n: int, k: int) -> Iterator[Subspace2]:
    """Rank-k subspaces whose basis vectors all have even weight"""
    for H in enum_subspaces(n, k):
        if all(v.bit_count() % 2 == 0 for v in H.basis):
            yield H


# ----------------------------------------------------------------------------
# Partitions
# ----------------------------------------------------------------------------

def odd_parts(parts: Partition) -> bool:
    return all(p % 2 for p in parts)


def odd_parts_ge3(parts: Partition) -> bool:
    return all(p % 2 and p >= 3 for p in parts)


def distinct_parts(parts: Partition) -> bool:
    return len(set(parts)) == len(parts)


def _partitions(N: int, cap: int) -> Iterator[Partition]:
    if N == 0:
        yield ()
        return
    for first in range(min(N, cap), 0, -1):
        for rest in _partitions(N - first, first):
            yield (first,) + rest


def enum_partitions(N: int, predicate: Optional[Callable[[Partition], bool]] = None) -> List[Partition]:
    """
    Partitions of N as decreasing tuples, optionally filtered

    Args:
        N: At most MAX_PARTITION_N
        predicate: Keep partitions for which it returns True
    """
    _require(N, MAX_PARTITION_N, "enum_partitions")
    return [parts for parts in _partitions(N, N) if predicate is None or predicate(parts)]


# ----------------------------------------------------------------------------
# Generating sets
# ----------------------------------------------------------------------------

def _key(f: SignedPermutation) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    return f.image, f.sign


def _mul(f, g):
    # (f g)(e_i) = f(sign_g[i] e_{g[i]})
    f_image, f_sign = f
    g_image, g_sign = g
    image = tuple(f_image[j - 1] for j in g_image)
    sign = tuple(g_sign[i] * f_sign[g_image[i] - 1] for i in range(len(g_image)))
    return image, sign


def _generated(generators: Sequence, n: int) -> frozenset:
    identity = (tuple(range(1, n + 1)), (1,) * n)
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = _mul(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def min_generating_set_size(elements: Sequence[SignedPermutation]) -> int:
    """
    Smallest number of elements generating the given finite group

    Tries every subset of size 0, 1, 2, ... of the group's own elements.
    """
    if not elements:
        raise PreconditionError("Empty element list")
    _require(len(elements), MAX_GENERATING_ORDER, "min_generating_set_size")
    n = elements[0].n
    group = frozenset(_key(f) for f in elements)
    if _generated(list(group), n) != group:
        raise PreconditionError("Elements do not form a group")
    ordered = sorted(group)
    for d in range(len(ordered) + 1):
        for subset in itertools.combinations(ordered, d):
            if _generated(subset, n) == group:
                return d
    raise PreconditionError("No generating subset found")
