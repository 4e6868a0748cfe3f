"""
Generating functions and partition counts

alpha_n(theta) = [x^n] ((1 + x)/(1 - x))^(theta/2) satisfies
    (n + 1) alpha_{n+1} = theta alpha_n + (n - 1) alpha_{n-1},
    alpha_0 = 1, alpha_1 = theta.
With theta = p/q the scaled values a'_n = q^n n! alpha_n are integers:
    a'_{n+1} = p a'_n + q^2 n (n - 1) a'_{n-1}.
For theta = 1, a'_n counts odd-order permutations of n letters; for
theta = 1/2 it counts odd-order signed permutations.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import sympy

from core.errors import InvariantViolation, PreconditionError
from core.utils import ceil_log2, log2_int, log_function, log_duration, parse_fraction

logger = logging.getLogger('Nielsen.Analytic')

STANDARD_THETAS = (Fraction(1), Fraction(1, 2))
PARTITION_CONSTANT = math.pi / math.sqrt(3)
DEFAULT_EXACT_CUTOFF = 5000
PARTITION_EXACT_LIMIT = 20000

Number = Union[Fraction, float]


@dataclass(frozen=True)
class ThetaWeight:
    value: Fraction

    def __post_init__(self):
        value = parse_fraction(self.value)
        if not 0 < value <= 1:
            raise PreconditionError(f"theta must lie in (0, 1], got {value}")
        object.__setattr__(self, 'value', value)

    @property
    def is_standard(self) -> bool:
        return self.value in STANDARD_THETAS


def as_theta(theta) -> Fraction:
    """Validated exact theta"""
    return ThetaWeight(theta).value


# ----------------------------------------------------------------------------
# alpha tables
# ----------------------------------------------------------------------------

_SCALED: Dict[Fraction, List[int]] = {}


def scaled_table(theta, N: int) -> List[int]:
    """a'_0 .. a'_N as exact integers; extends a per-theta cache"""
    theta = as_theta(theta)
    p, q = theta.numerator, theta.denominator
    table = _SCALED.setdefault(theta, [1, p])
    q2 = q * q
    while len(table) <= N:
        n = len(table) - 1
        table.append(p * table[n] + q2 * n * (n - 1) * table[n - 1])
    return table[:N + 1]


@dataclass(frozen=True)
class AlphaTable:
    theta: Fraction
    scaled: Tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.scaled) - 1

    def alpha(self, n: int) -> Fraction:
        return Fraction(self.scaled[n], self.theta.denominator ** n * math.factorial(n))

    def a(self, n: int) -> Fraction:
        """a_n = n! alpha_n"""
        return Fraction(self.scaled[n], self.theta.denominator ** n)


def alpha_table(theta, N: int) -> AlphaTable:
    """Exact alpha_0 .. alpha_N"""
    if N < 0:
        raise PreconditionError("alpha_table needs N >= 0")
    theta = as_theta(theta)
    return AlphaTable(theta, tuple(scaled_table(theta, N)))


def a_n(theta, n: int) -> int:
    """Scaled integer q^n n! alpha_n"""
    return scaled_table(theta, n)[n]


@lru_cache(maxsize=8)
def log_alpha_table(theta: Fraction, N: int) -> np.ndarray:
    """log alpha_0 .. log alpha_N through the ratio recurrence"""
    t = float(theta)
    logs = np.zeros(N + 1)
    if N >= 1:
        ratio = t
        logs[1] = math.log(t)
        for n in range(1, N):
            ratio = (t + (n - 1) / ratio) / (n + 1)
            logs[n + 1] = logs[n] + math.log(ratio)
    return logs


def float_drift(theta, N: int = DEFAULT_EXACT_CUTOFF) -> float:
    """Relative error of the float table against the exact alpha_N"""
    theta = as_theta(theta)
    exact = scaled_table(theta, N)[N]
    log_exact = (log2_int(exact) - N * math.log2(theta.denominator)) * math.log(2) - math.lgamma(N + 1)
    return abs(math.expm1(log_alpha_table(theta, N)[N] - log_exact))


def A(n: int, s: int, theta, exact_cutoff: int = DEFAULT_EXACT_CUTOFF) -> Number:
    """
    A_{n,s} = alpha_{n-s} / alpha_n

    Exact Fraction for n <= exact_cutoff, float above.
    """
    if not 0 <= s <= n:
        raise PreconditionError(f"A(n, s) needs 0 <= s <= n, got n={n}, s={s}")
    theta = as_theta(theta)
    if n <= exact_cutoff:
        table = scaled_table(theta, n)
        falling = math.perm(n, s)
        return Fraction(theta.denominator ** s * falling * table[n - s], table[n])
    logs = log_alpha_table(theta, n)
    return math.exp(logs[n - s] - logs[n])


def prob_no_p_cycle(n: int, p: int, theta, exact_cutoff: int = DEFAULT_EXACT_CUTOFF) -> Number:
    """
    P(C_p = 0) under the theta-weighted law on odd-order permutations

    sum_j (-1)^j theta^j A_{n, jp} / (p^j j!)
    """
    if p % 2 == 0:
        raise PreconditionError(f"Cycle length {p} is even")
    theta = as_theta(theta)
    if p > n:
        return Fraction(1) if n <= exact_cutoff else 1.0
    if n <= exact_cutoff:
        # one integer numerator over the common denominator p^J J! a'_n
        P, Q = theta.numerator, theta.denominator
        table = scaled_table(theta, n)
        J = n // p
        total, cofactor = 0, math.factorial(J) * p ** J
        for j in range(J + 1):
            term = P ** j * Q ** (j * (p - 1)) * math.perm(n, j * p) * table[n - j * p] * cofactor
            total += -term if j % 2 else term
            if j < J:
                cofactor = cofactor // (p * (j + 1))
        return Fraction(total, math.factorial(J) * p ** J * table[n])
    total = 0.0
    t = float(theta)
    for j in range(n // p + 1):
        term = (t / p) ** j / math.factorial(j) * A(n, j * p, theta, exact_cutoff)
        total += -term if j % 2 else term
        if j > 4 and term < 1e-18:
            break
    return total


def factorial_moment(n: int, spec: Dict[int, int], theta, exact_cutoff: int = DEFAULT_EXACT_CUTOFF) -> Number:
    """
    E[prod_i (C_{k_i})_{j_i}] = prod_i (theta / k_i)^{j_i} * A_{n, s}

    Args:
        spec: cycle length k -> falling-factorial order j (k odd)
    """
    if any(k % 2 == 0 or k < 1 for k in spec):
        raise PreconditionError(f"Cycle lengths {sorted(spec)} must be odd")
    theta = as_theta(theta)
    s = sum(k * j for k, j in spec.items())
    if s > n:
        return Fraction(0) if n <= exact_cutoff else 0.0
    weight = Fraction(1)
    for k, j in spec.items():
        weight *= (theta / k) ** j
    value = A(n, s, theta, exact_cutoff)
    return weight * value if isinstance(value, Fraction) else float(weight) * value


def small_primes(n: int, log_base: str = "e") -> List[int]:
    """Odd primes p <= (log n)^2"""
    if n <= 1:
        return []
    threshold = log_function(log_base)(n) ** 2
    return [int(p) for p in sympy.primerange(3, math.floor(threshold) + 1)]


@dataclass(frozen=True)
class ExpectedPn:
    n: int
    theta: Fraction
    value: Number
    primes: Tuple[int, ...]
    asymptote: Optional[float]

    def to_dict(self) -> Dict:
        return {"n": self.n, "theta": str(self.theta), "value": float(self.value),
                "exact": str(self.value) if isinstance(self.value, Fraction) else None,
                "primes": len(self.primes), "theta_logloglog_n": self.asymptote}


def expected_P_n(n: int, theta, log_base: str = "e", exact_cutoff: int = DEFAULT_EXACT_CUTOFF) -> ExpectedPn:
    """E[P_n]: sum over small odd primes of P(C_p > 0)"""
    theta = as_theta(theta)
    primes = small_primes(n, log_base)
    value: Number = Fraction(0) if n <= exact_cutoff else 0.0
    for p in primes:
        value += 1 - prob_no_p_cycle(n, p, theta, exact_cutoff)
    asymptote = None
    if n > math.e ** math.e:
        asymptote = float(theta) * math.log(math.log(math.log(n)))
    return ExpectedPn(n, theta, value, tuple(primes), asymptote)


# ----------------------------------------------------------------------------
# Partitions into odd parts
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionTables:
    """q_odd and q_ge3 for 0..N; exact Python ints or float64"""
    q_odd_values: np.ndarray
    q_ge3_values: np.ndarray
    exact: bool

    @property
    def N(self) -> int:
        return len(self.q_odd_values) - 1

    def q_odd(self, N: int):
        return self._get(self.q_odd_values, N)

    def q_ge3(self, N: int):
        return self._get(self.q_ge3_values, N)

    def _get(self, values: np.ndarray, N: int):
        if N < 0:
            return 0
        value = values[N]
        return int(value) if self.exact else float(value)


def _odd_part_counts(N: int, smallest: int, dtype) -> np.ndarray:
    """Partitions into odd parts >= smallest; one cumulative sum per part size"""
    q = np.zeros(N + 1, dtype=dtype)
    q[0] = 1
    for k in range(smallest, N + 1, 2):
        rows = -(-(N + 1) // k)
        padded = np.zeros(rows * k, dtype=dtype)
        padded[:N + 1] = q
        q = np.cumsum(padded.reshape(rows, k), axis=0).reshape(-1)[:N + 1]
    return q


@lru_cache(maxsize=8)
@log_duration("q_tables")
def q_tables(N_max: int, exact: Optional[bool] = None, exact_cutoff: int = PARTITION_EXACT_LIMIT) -> PartitionTables:
    """
    q_odd(0..N_max) and q_ge3(0..N_max)

    q_ge3 comes from its own DP; q_odd(N) is the running sum of q_ge3(0..N)
    (pad a partition into parts >= 3 with ones).

    Args:
        N_max: Largest argument
        exact: Python integers (default when N_max <= exact_cutoff) or float64
    """
    if N_max < 0:
        raise PreconditionError("q_tables needs N_max >= 0")
    exact = N_max <= exact_cutoff if exact is None else exact
    dtype = object if exact else np.float64
    q_ge3 = _odd_part_counts(N_max, 3, dtype)
    q_odd = np.cumsum(q_ge3)
    if any(v < 0 for v in q_ge3):
        raise InvariantViolation("q_ge3 has a negative entry")
    return PartitionTables(q_odd, q_ge3, exact)


def q_ratio_check(N: int, s: int) -> Dict[str, float]:
    """q_ge3(N - s)/q_ge3(N) against exp(-A s / (2 sqrt N))"""
    if not 0 <= s <= N:
        raise PreconditionError(f"Need 0 <= s <= N, got N={N}, s={s}")
    tables = q_tables(N)
    ratio = _ratio(tables.q_ge3(N - s), tables.q_ge3(N))
    approx = math.exp(-PARTITION_CONSTANT * s / (2 * math.sqrt(N)))
    return {"N": N, "s": s, "exact_ratio": ratio, "approximation": approx,
            "relative_error": abs(ratio - approx) / approx}


def _ratio(num, den) -> float:
    if isinstance(num, int) and isinstance(den, int):
        return float(Fraction(num, den))
    return float(num) / float(den)


def _log(value) -> float:
    return log2_int(value) * math.log(2) if isinstance(value, int) else math.log(value)


def k_hat(N: int) -> float:
    """q_ge3(N) N^(5/4) exp(-A sqrt N); its stabilization estimates the constant"""
    value = q_tables(N).q_ge3(N)
    return math.exp(_log(value) + 1.25 * math.log(N) - PARTITION_CONSTANT * math.sqrt(N))


def default_t_max(n: int) -> int:
    """floor(sqrt(n) / ln n)"""
    if n < 2:
        return 0
    return math.floor(math.sqrt(n) / math.log(n))


def prime_window(N: int, a: float, b: float) -> List[int]:
    """Primes p with a sqrt(N) <= p <= b sqrt(N)"""
    lo, hi = a * math.sqrt(N), b * math.sqrt(N)
    return [int(p) for p in sympy.primerange(max(3, math.ceil(lo)), math.floor(hi) + 1)]


def expected_R_n(N: int, a: float = 0.5, b: float = 2.0) -> float:
    """sum over window primes of q_ge3(N - p) / q_ge3(N)"""
    tables = q_tables(N)
    return sum(_ratio(tables.q_ge3(N - p), tables.q_ge3(N)) for p in prime_window(N, a, b))


def expected_R_n_constrained(N: int, t_max: int, a: float = 0.5, b: float = 2.0) -> float:
    """
    E[R_n] for uniform odd partitions of N with at most t_max parts equal to 1

    P(p is a part) = sum_r q_ge3(N - r - p) / sum_r q_ge3(N - r), r <= t_max.
    """
    tables = q_tables(N)
    rs = range(min(t_max, N) + 1)
    denominator = sum(tables.q_ge3(N - r) for r in rs)
    if not denominator:
        raise PreconditionError(f"No odd partition of {N} with at most {t_max} ones")
    return sum(_ratio(sum(tables.q_ge3(N - r - p) for r in rs), denominator)
               for p in prime_window(N, a, b))


# ----------------------------------------------------------------------------
# Counting bounds
# ----------------------------------------------------------------------------

def _log2_factorial(n: int) -> float:
    return math.lgamma(n + 1) / math.log(2)


def _log2_gaussian_binomial(n: int, k: int) -> float:
    """log2 of gaussian_binomial(n, k) without building the integer"""
    correction = sum(math.log1p(-2.0 ** -(n - i)) - math.log1p(-2.0 ** -(k - i)) for i in range(k))
    return k * (n - k) + correction / math.log(2)


@dataclass(frozen=True)
class CountingBounds:
    n: int
    two_group_lower_log2: int
    generated_upper_log2: float
    abelian_lower_log2: float
    abelian_upper_log2: float
    cohomology_exponent: float

    @property
    def generated_minus_lower(self) -> float:
        return self.generated_upper_log2 - self.two_group_lower_log2

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "two_group_lower_log2": self.two_group_lower_log2,
            "generated_upper_log2": self.generated_upper_log2,
            "log2_B_minus_log2_A": self.generated_minus_lower,
            "abelian_lower_log2": self.abelian_lower_log2,
            "abelian_upper_log2": self.abelian_upper_log2,
            "cohomology_exponent": self.cohomology_exponent,
        }


def counting_bounds(n: int) -> CountingBounds:
    """
    Bounds behind the counting arguments

    2-subgroups of S_n number at least 2^floor(k^2/4) with k = floor(n/2);
    groups generated by ceil(log2 n) + 5 elements number at most
    (n!)^(ceil(log2 n) + 5); subgroups of G_n of rank floor(n/2) give the
    abelian lower bound and (log2 3) n^2/9 + 7n is the abelian upper exponent.
    """
    if n < 1:
        raise PreconditionError("counting_bounds needs n >= 1")
    k = n // 2
    return CountingBounds(
        n=n,
        two_group_lower_log2=k * k // 4,
        generated_upper_log2=(ceil_log2(n) + 5) * _log2_factorial(n),
        abelian_lower_log2=_log2_gaussian_binomial(n, n // 2),
        abelian_upper_log2=math.log2(3) * n * n / 9 + 7 * n,
        cohomology_exponent=n * n / 16,
    )


def generation_bound_threshold(n_max: int = 10000) -> Optional[int]:
    """Smallest n from which log2 B_n - log2 A_n stays negative up to n_max"""
    threshold = None
    for n in range(1, n_max + 1):
        negative = counting_bounds(n).generated_minus_lower < 0
        if negative and threshold is None:
            threshold = n
        elif not negative:
            threshold = None
    return threshold


def abelian_crossing(n_max: int = 2000) -> Optional[int]:
    """Smallest n where the abelian upper exponent drops below log2 of gaussian_binomial(n, n/2)"""
    for n in range(1, n_max + 1):
        bounds = counting_bounds(n)
        if bounds.abelian_upper_log2 < bounds.abelian_lower_log2:
            return n
    return None
