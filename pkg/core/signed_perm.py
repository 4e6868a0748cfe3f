"""
Signed permutation matrices: the group O(n, Z)

An element is stored as an underlying permutation `image` (1-indexed) and
per-column signs. The matrix form puts sign[i] at row image[i] of column i,
so f sends e_i to sign[i] * e_{image[i]}.
"""

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from core.errors import ParseError, PreconditionError


@dataclass(frozen=True)
class CycleType:
    """
    Multiset of cycle lengths, kept sorted in decreasing order

    Fixed points are explicit parts equal to 1.
    """
    parts: Tuple[int, ...]

    def __post_init__(self):
        if any(not isinstance(p, int) or p < 1 for p in self.parts):
            raise PreconditionError(f"Cycle lengths must be positive integers: {self.parts}")
        object.__setattr__(self, 'parts', tuple(sorted(self.parts, reverse=True)))

    @classmethod
    def of(cls, parts: Sequence[int], n: int = None) -> "CycleType":
        """
        Build a cycle type, padding with fixed points up to n

        Args:
            parts: Cycle lengths (ones optional)
            n: Ambient size; defaults to the sum of parts
        """
        parts = [int(p) for p in parts]
        total = sum(parts)
        if n is not None:
            if n < total:
                raise PreconditionError(f"Parts sum to {total} > n = {n}")
            parts += [1] * (n - total)
        return cls(tuple(parts))

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def num_cycles(self) -> int:
        return len(self.parts)

    def count(self, d: int) -> int:
        """C_d: number of d-cycles"""
        return self.parts.count(d)

    def counts(self) -> Dict[int, int]:
        return dict(Counter(self.parts))

    def distinct_nontrivial(self) -> List[int]:
        """Distinct cycle lengths greater than 1, increasing"""
        return sorted({p for p in self.parts if p > 1})

    @property
    def order(self) -> int:
        return math.lcm(*self.parts) if self.parts else 1

    def is_odd(self) -> bool:
        return all(p % 2 == 1 for p in self.parts)

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts)


@dataclass(frozen=True)
class SignedCycleType:
    """Multiset of (length, sign parity) pairs, sorted"""
    cycles: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, 'cycles', tuple(sorted(self.cycles)))

    @property
    def n(self) -> int:
        return sum(length for length, _ in self.cycles)

    def __str__(self) -> str:
        return ",".join(f"{length}{'-' if parity else '+'}" for length, parity in self.cycles)


@dataclass(frozen=True)
class SignedPermutation:
    """Element of O(n, Z) as permutation plus per-column signs"""
    image: Tuple[int, ...]
    sign: Tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(i) for i in self.image)
        sign = tuple(int(s) for s in self.sign)
        if len(image) != len(sign):
            raise PreconditionError("image and sign must have the same length")
        if sorted(image) != list(range(1, len(image) + 1)):
            raise PreconditionError(f"image is not a bijection on 1..{len(image)}: {image}")
        if any(s not in (1, -1) for s in sign):
            raise PreconditionError(f"signs must be +1 or -1: {sign}")
        object.__setattr__(self, 'image', image)
        object.__setattr__(self, 'sign', sign)

    @property
    def n(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, n: int) -> "SignedPermutation":
        return cls(tuple(range(1, n + 1)), (1,) * n)

    @classmethod
    def diagonal(cls, signs: Sequence[int]) -> "SignedPermutation":
        return cls(tuple(range(1, len(signs) + 1)), tuple(signs))

    @classmethod
    def from_vector(cls, v: int, n: int) -> "SignedPermutation":
        """Diagonal element whose -1 entries are the set bits of v"""
        return cls.diagonal([-1 if (v >> i) & 1 else 1 for i in range(n)])

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]],
                    signs: Sequence[int] = None) -> "SignedPermutation":
        """
        Build from disjoint cycles given as point lists (1-indexed)

        Args:
            n: Matrix size
            cycles: Each cycle maps c[0] -> c[1] -> ... -> c[0]
            signs: Optional full sign vector, defaults to all +1
        """
        image = list(range(1, n + 1))
        for cycle in cycles:
            for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
                image[a - 1] = b
        return cls(tuple(image), tuple(signs) if signs is not None else (1,) * n)

    @classmethod
    def from_cycle_type(cls, ct: CycleType) -> "SignedPermutation":
        """Plain permutation with consecutive cycles of the given lengths"""
        cycles, start = [], 1
        for length in ct.parts:
            cycles.append(list(range(start, start + length)))
            start += length
        return cls.from_cycles(ct.n, cycles)

    def matrix(self) -> np.ndarray:
        """Dense integer matrix, column convention"""
        m = np.zeros((self.n, self.n), dtype=np.int64)
        for i, (row, s) in enumerate(zip(self.image, self.sign)):
            m[row - 1, i] = s
        return m

    def is_diagonal(self) -> bool:
        return all(i == j for j, i in enumerate(self.image, start=1))

    def diagonal_vector(self) -> int:
        """F2 vector of -1 entries; only meaningful for diagonal elements"""
        return sum(1 << i for i, s in enumerate(self.sign) if s == -1)

    def diagonal_plus_count(self) -> int:
        """Number of +1 entries on the matrix diagonal"""
        return sum(1 for j, (i, s) in enumerate(zip(self.image, self.sign), start=1) if i == j and s == 1)

    def cycles(self) -> List[List[int]]:
        """Cycle decomposition of the underlying permutation, fixed points included"""
        seen = [False] * (self.n + 1)
        result = []
        for start in range(1, self.n + 1):
            if seen[start]:
                continue
            cycle, j = [], start
            while not seen[j]:
                seen[j] = True
                cycle.append(j)
                j = self.image[j - 1]
            result.append(cycle)
        return result

    def __str__(self) -> str:
        return format_element(self)


def compose(f: SignedPermutation, g: SignedPermutation) -> SignedPermutation:
    """
    Matrix product f . g

    Args:
        f: Left factor
        g: Right factor (applied first)

    Returns:
        The signed permutation with matrix(f) @ matrix(g)
    """
    if f.n != g.n:
        raise PreconditionError(f"Dimension mismatch: {f.n} vs {g.n}")
    image = tuple(f.image[g.image[i] - 1] for i in range(g.n))
    sign = tuple(g.sign[i] * f.sign[g.image[i] - 1] for i in range(g.n))
    return SignedPermutation(image, sign)


def inverse(f: SignedPermutation) -> SignedPermutation:
    """Inverse, equal to the transpose"""
    image = [0] * f.n
    sign = [1] * f.n
    for i, (j, s) in enumerate(zip(f.image, f.sign), start=1):
        image[j - 1] = i
        sign[j - 1] = s
    return SignedPermutation(tuple(image), tuple(sign))


def power(f: SignedPermutation, k: int) -> SignedPermutation:
    """f^k by repeated squaring; negative k uses the inverse"""
    if k < 0:
        return power(inverse(f), -k)
    result = SignedPermutation.identity(f.n)
    base = f
    while k:
        if k & 1:
            result = compose(result, base)
        base = compose(base, base)
        k >>= 1
    return result


def signed_cycle_type(f: SignedPermutation) -> SignedCycleType:
    cycles = []
    for cycle in f.cycles():
        parity = sum(1 for i in cycle if f.sign[i - 1] == -1) % 2
        cycles.append((len(cycle), parity))
    return SignedCycleType(tuple(cycles))


def cycle_type(f: SignedPermutation) -> CycleType:
    return CycleType(tuple(len(c) for c in f.cycles()))


def project(f: SignedPermutation) -> SignedPermutation:
    """Forget signs"""
    return SignedPermutation(f.image, (1,) * f.n)


def order(f: SignedPermutation) -> int:
    """
    Multiplicative order

    A d-cycle with sign parity 0 contributes d, with parity 1 it
    contributes 2d; the order is the lcm of the contributions.
    """
    contributions = [length * (2 if parity else 1) for length, parity in signed_cycle_type(f).cycles]
    return math.lcm(*contributions) if contributions else 1


def is_odd_order(f: SignedPermutation) -> bool:
    return all(length % 2 == 1 and parity == 0 for length, parity in signed_cycle_type(f).cycles)


def count_odd_order_lifts(ct: CycleType) -> int:
    """
    Number of odd-order signed lifts of a permutation with cycle type ct

    Each cycle needs an even number of -1 signs, leaving 2^(d-1) choices
    per d-cycle, hence 2^(n - c).
    """
    if not ct.is_odd():
        raise PreconditionError(f"Cycle type {ct} has an even part")
    return 2 ** (ct.n - ct.num_cycles)


def all_signed_permutations(n: int) -> Iterator[SignedPermutation]:
    """Every element of O(n, Z); 2^n * n! of them"""
    for perm in itertools.permutations(range(1, n + 1)):
        for signs in itertools.product((1, -1), repeat=n):
            yield SignedPermutation(perm, signs)


def parse_element(text: str) -> SignedPermutation:
    """
    Parse 'n; i1,...,in; s1,...,sn' with signs written + or -

    Args:
        text: Element in the line format

    Returns:
        Parsed SignedPermutation
    """
    fields = [part.strip() for part in text.strip().split(';')]
    if len(fields) != 3:
        raise ParseError(f"Expected 'n; images; signs', got '{text}'")
    try:
        n = int(fields[0])
        image = tuple(int(x) for x in fields[1].split(','))
    except ValueError as e:
        raise ParseError(f"Bad integer in element '{text}': {e}") from e
    sign_tokens = [s.strip() for s in fields[2].split(',')]
    if any(tok not in ('+', '-', '+1', '-1', '1') for tok in sign_tokens):
        raise ParseError(f"Signs must be + or -: '{fields[2]}'")
    sign = tuple(-1 if tok.startswith('-') else 1 for tok in sign_tokens)
    if len(image) != n or len(sign) != n:
        raise ParseError(f"Element '{text}' does not have {n} images and signs")
    return SignedPermutation(image, sign)


def format_element(f: SignedPermutation) -> str:
    images = ",".join(str(i) for i in f.image)
    signs = ",".join('+' if s == 1 else '-' for s in f.sign)
    return f"{f.n}; {images}; {signs}"


def parse_cycle_type(text: str, n: int = None) -> CycleType:
    """Parse '3,5,7' (optionally padded with fixed points up to n)"""
    try:
        parts = [int(x) for x in text.replace(' ', '').split(',') if x]
    except ValueError as e:
        raise ParseError(f"Bad cycle type '{text}': {e}") from e
    if not parts and not n:
        raise ParseError("Empty cycle type")
    return CycleType.of(parts, n)
