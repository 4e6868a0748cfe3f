"""
Random generators for the probability models

- theta-weighted odd-order permutations: the cycle through the smallest
  unplaced point has odd length k with probability theta alpha_{m-k} / (m alpha_m)
- uniform subspaces of F2^n, of fixed or random rank
- uniform odd partitions with a bounded number of ones

Every draw goes through a RandomStream; substreams are addressed by index so
results do not depend on how trials are scheduled.
"""

import logging
import math
from functools import lru_cache
from typing import Iterator, List, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from core.analytic import DEFAULT_EXACT_CUTOFF, as_theta, log_alpha_table, q_tables, scaled_table
from core.errors import EmptySupportError, InvariantViolation, PreconditionError
from core.signed_perm import CycleType, SignedPermutation
from core.subspaces import Subspace2, galois_number, gaussian_binomial, rref

logger = logging.getLogger('Nielsen.Samplers')

DEFAULT_PARTITION_TABLE_CUTOFF = 600
FLOAT_MASS_GUARD = 1e-12
FLOAT_MASS_TOLERANCE = 1e-9
MAX_BOLTZMANN_ATTEMPTS = 10 ** 6


class RandomStream:
    """
    Deterministic generator addressed by (seed, path)

    The same seed and path always produce the same sequence; spawn(i) gives
    an independent child stream.
    """

    def __init__(self, seed: int, path: Tuple[int, ...] = ()):
        if not 0 <= seed < 2 ** 64:
            raise PreconditionError(f"Seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.path = tuple(int(i) for i in path)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self.rng = np.random.Generator(np.random.PCG64(sequence))

    def spawn(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, self.path + (index,))

    def random(self) -> float:
        return float(self.rng.random())

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound), exact for arbitrarily large bounds"""
        if bound <= 0:
            raise PreconditionError(f"randbelow needs a positive bound, got {bound}")
        if bound < 2 ** 62:
            return int(self.rng.integers(bound))
        bits = (bound - 1).bit_length()
        words = -(-bits // 64)
        while True:
            raw = self.rng.bit_generator.random_raw(words)
            value = int.from_bytes(np.asarray(raw, dtype='<u8').tobytes(), 'little') >> (64 * words - bits)
            if value < bound:
                return value

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, path={self.path})"


# ----------------------------------------------------------------------------
# Odd-order permutations
# ----------------------------------------------------------------------------

def cycle_length_weights(m: int, theta) -> List[Tuple[int, int]]:
    """
    Integer weights for the length of the cycle through the smallest of m points

    w_k = p q^(k-1) (m-1)!/(m-k)! a'_{m-k} for odd k <= m; they sum to a'_m.
    """
    theta = as_theta(theta)
    p, q = theta.numerator, theta.denominator
    table = scaled_table(theta, m)
    weights, falling, qpow = [], 1, 1
    for k in range(1, m + 1, 2):
        weights.append((k, p * qpow * falling * table[m - k]))
        falling *= (m - k) * (m - k - 1)
        qpow *= q * q
    return weights


def _exact_cycle_length(m: int, theta, stream: RandomStream) -> int:
    theta = as_theta(theta)
    p, q = theta.numerator, theta.denominator
    table = scaled_table(theta, m)
    u = stream.randbelow(table[m])
    falling, qpow = 1, 1
    for k in range(1, m + 1, 2):
        u -= p * qpow * falling * table[m - k]
        if u < 0:
            return k
        falling *= (m - k) * (m - k - 1)
        qpow *= q * q
    raise InvariantViolation(f"Cycle-length weights for m={m} do not sum to a'_m")


def _float_cycle_length(m: int, logs: np.ndarray, theta: float, stream: RandomStream) -> int:
    ks = np.arange(1, m + 1, 2)
    probs = theta / m * np.exp(logs[m - ks] - logs[m])
    cumulative = np.cumsum(probs)
    deviation = abs(cumulative[-1] - 1.0)
    if deviation > FLOAT_MASS_TOLERANCE:
        raise InvariantViolation(f"Float cycle-length law at m={m} has mass off by {deviation:.3e}")
    if deviation > FLOAT_MASS_GUARD:
        logger.debug(f"Cycle-length mass at m={m} deviates from 1 by {deviation:.3e}")
    index = int(np.searchsorted(cumulative, stream.random() * cumulative[-1], side='right'))
    return int(ks[min(index, len(ks) - 1)])


def _cycle_lengths(n: int, theta, stream: RandomStream, exact_cutoff: int) -> Iterator[int]:
    m = n
    if n <= exact_cutoff:
        while m:
            k = _exact_cycle_length(m, theta, stream)
            yield k
            m -= k
        return
    logs = log_alpha_table(as_theta(theta), n)
    t = float(as_theta(theta))
    while m:
        k = _float_cycle_length(m, logs, t, stream) if m > exact_cutoff else _exact_cycle_length(m, theta, stream)
        yield k
        m -= k


def sample_odd_order_perm(n: int, theta, stream: RandomStream,
                          exact_cutoff: int = DEFAULT_EXACT_CUTOFF,
                          materialize: bool = False) -> Union[CycleType, SignedPermutation]:
    """
    Draw from P_{n,theta} on odd-order permutations of n letters

    Args:
        n: Number of letters, n >= 1
        theta: Weight per cycle in (0, 1]
        stream: Random source
        exact_cutoff: Largest n sampled with exact integer weights
        materialize: Return a concrete permutation instead of its cycle type

    Returns:
        CycleType, or a plain SignedPermutation when materialize is set
    """
    if n < 1:
        raise PreconditionError(f"sample_odd_order_perm needs n >= 1, got {n}")
    lengths = list(_cycle_lengths(n, theta, stream, exact_cutoff))
    if any(k % 2 == 0 for k in lengths) or sum(lengths) != n:
        raise InvariantViolation(f"Sampled cycle lengths {lengths} are not an odd partition of {n}")
    if not materialize:
        return CycleType.of(lengths)

    remaining = list(range(1, n + 1))
    cycles = []
    for k in lengths:
        first, rest = remaining[0], remaining[1:]
        picked = stream.rng.choice(len(rest), size=k - 1, replace=False) if k > 1 else []
        cycle = [first] + [rest[int(i)] for i in picked]
        chosen = set(cycle)
        remaining = [x for x in remaining if x not in chosen]
        cycles.append(cycle)
    return SignedPermutation.from_cycles(n, cycles)


# ----------------------------------------------------------------------------
# Subspaces of F2^n
# ----------------------------------------------------------------------------

def sample_subspace(n: int, k: int, stream: RandomStream) -> Subspace2:
    """
    Uniform rank-k subspace of F2^n

    Uniform k x n matrices are redrawn until they have rank k; every
    subspace has the same number of ordered bases, so the result is uniform.
    """
    if k < 0 or k > n:
        raise PreconditionError(f"sample_subspace needs 0 <= k <= n, got n={n}, k={k}")
    if k == 0:
        return Subspace2.zero(n)
    while True:
        basis = rref(stream.randbelow(1 << n) for _ in range(k))
        if len(basis) == k:
            return Subspace2(n, basis)


def sample_subspace_any_rank(n: int, stream: RandomStream) -> Subspace2:
    """Uniform over all subspaces: rank k with probability gaussian_binomial(n, k) / galois_number(n)"""
    if n < 0:
        raise PreconditionError("sample_subspace_any_rank needs n >= 0")
    u = stream.randbelow(galois_number(n))
    for k in range(n + 1):
        u -= gaussian_binomial(n, k)
        if u < 0:
            return sample_subspace(n, k, stream)
    raise InvariantViolation(f"Rank weights for n={n} do not sum to galois_number(n)")


# ----------------------------------------------------------------------------
# Odd partitions with bounded ones
# ----------------------------------------------------------------------------

@lru_cache(maxsize=4)
def _count_table(N: int) -> Tuple[Tuple[int, ...], Tuple[np.ndarray, ...]]:
    """
    rows[j][s]: partitions of s into odd parts from parts[:j], parts = 3, 5, 7, ...
    """
    parts = tuple(range(3, N + 1, 2))
    row = np.zeros(N + 1, dtype=object)
    row[0] = 1
    rows = [row]
    for part in parts:
        n_rows = -(-(N + 1) // part)
        padded = np.zeros(n_rows * part, dtype=object)
        padded[:N + 1] = rows[-1]
        rows.append(np.cumsum(padded.reshape(n_rows, part), axis=0).reshape(-1)[:N + 1])
    return parts, tuple(rows)


def _table_partition(N: int, stream: RandomStream, table_size: int) -> List[int]:
    """Uniform partition of N into odd parts >= 3 by descent through the table for table_size >= N"""
    parts, rows = _count_table(table_size)
    j = (N - 1) // 2 if N >= 3 else 0
    total = int(rows[j][N])
    if not total:
        raise EmptySupportError(f"No partition of {N} into odd parts >= 3")
    u = stream.randbelow(total)
    s, result = N, []
    while s:
        part = parts[j - 1]
        take = int(rows[j][s - part]) if s >= part else 0
        if u < take:
            result.append(part)
            s -= part
        else:
            u -= take
            j -= 1
    return result


@lru_cache(maxsize=64)
def _boltzmann_parameter(N: int) -> float:
    """x with expected size sum_k k x^k / (1 - x^k) = N over odd k in [3, N]"""
    ks = np.arange(3, N + 1, 2, dtype=float)

    def excess(log_x: float) -> float:
        xk = np.exp(ks * log_x)
        return float(np.sum(ks * xk / -np.expm1(ks * log_x))) - N

    return math.exp(brentq(excess, -50.0, -1e-12))


def _boltzmann_partition(N: int, stream: RandomStream) -> List[int]:
    """
    Uniform partition of N into odd parts >= 3 by Boltzmann rejection

    Multiplicities of parts >= 5 are independent geometrics; the multiplicity
    of 3 is then forced and accepted with probability x^(3 c), which makes the
    accepted sample exactly uniform.
    """
    x = _boltzmann_parameter(N)
    ks = np.arange(5, N + 1, 2)
    success = -np.expm1(ks * math.log(x))
    for attempt in range(1, MAX_BOLTZMANN_ATTEMPTS + 1):
        counts = stream.rng.geometric(success) - 1 if len(ks) else np.zeros(0, dtype=np.int64)
        residual = N - int(np.dot(ks, counts))
        if residual < 0 or residual % 3:
            continue
        threes = residual // 3
        if stream.random() < x ** residual:
            logger.debug(f"Boltzmann sampler at N={N} accepted after {attempt} attempts")
            result = [3] * threes
            for k, c in zip(ks[counts > 0], counts[counts > 0]):
                result += [int(k)] * int(c)
            return result
    raise InvariantViolation(f"Boltzmann sampler at N={N} exhausted {MAX_BOLTZMANN_ATTEMPTS} attempts")


def sample_odd_partition_bounded_ones(n: int, t_max: int, stream: RandomStream,
                                      table_cutoff: int = DEFAULT_PARTITION_TABLE_CUTOFF) -> CycleType:
    """
    Uniform partition of n into odd parts with at most t_max parts equal to 1

    The number r of ones is drawn with weight q_ge3(n - r); the rest is a
    uniform partition of n - r into odd parts >= 3.

    Args:
        n: Size, n >= 1
        t_max: Bound on the number of ones
        stream: Random source
        table_cutoff: Largest n - r handled by count-table descent

    Returns:
        The partition as a CycleType (parts sorted decreasing)
    """
    if n < 1 or t_max < 0:
        raise PreconditionError(f"Need n >= 1 and t_max >= 0, got n={n}, t_max={t_max}")
    tables = q_tables(n, exact=True)
    weights = [tables.q_ge3(n - r) for r in range(min(t_max, n) + 1)]
    total = sum(weights)
    if not total:
        raise EmptySupportError(f"No odd partition of {n} has at most {t_max} ones")
    u = stream.randbelow(total)
    for r, w in enumerate(weights):
        u -= w
        if u < 0:
            break
    rest = n - r
    if rest == 0:
        parts = []
    elif rest <= table_cutoff:
        parts = _table_partition(rest, stream, min(n, table_cutoff))
    else:
        parts = _boltzmann_partition(rest, stream)
    return CycleType.of(parts + [1] * r)
