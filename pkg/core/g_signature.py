"""
Signature defects and the G-signature balance for linear actions on CP2

A Z/m action with an isolated fixed point of rotation numbers (a, b)
contributes
    def(a, b; m) = sum_{k=1}^{m-1} (1 + z^ka)(1 + z^kb) / ((1 - z^ka)(1 - z^kb))
with z = exp(2 pi i / m). The sum is Galois-stable, so the exact value
computed in Q(zeta_m) must reduce to a rational.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Tuple

from core.cyclotomic import CycloElement
from core.errors import PreconditionError

logger = logging.getLogger('Nielsen.GSignature')

# quotient signature of a linear CP2 action: the invariant form is positive definite of rank 1
QUOTIENT_SIGNATURE = 1
CP2_SIGNATURE = 1


@dataclass(frozen=True)
class RotationNumbers:
    """Tangent weights (a, b) mod m, up to (a,b) ~ (b,a) ~ (-a,-b)"""
    a: int
    b: int
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise PreconditionError(f"Rotation numbers need m >= 2, got {self.m}")
        object.__setattr__(self, 'a', self.a % self.m)
        object.__setattr__(self, 'b', self.b % self.m)

    def is_free(self) -> bool:
        """Both characters nontrivial at every nontrivial group element"""
        return math.gcd(self.a, self.m) == 1 and math.gcd(self.b, self.m) == 1

    def canonical(self) -> "RotationNumbers":
        m = self.m
        candidates = [(self.a, self.b), (self.b, self.a), (-self.a % m, -self.b % m), (-self.b % m, -self.a % m)]
        a, b = min(candidates)
        return RotationNumbers(a, b, m)

    def ratio(self) -> int:
        """Canonical b/a mod m: invariant under swapping and negating"""
        q = self.b * pow(self.a, -1, self.m) % self.m
        return min(q, pow(q, -1, self.m))


def _require_free(rn: RotationNumbers) -> None:
    if not rn.is_free():
        raise PreconditionError(
            f"Rotation numbers ({rn.a},{rn.b}) mod {rn.m} are not coprime to m"
        )


@lru_cache(maxsize=None)
def _cotangent_factors(m: int) -> Tuple[CycloElement, ...]:
    """(1 + z^k) / (1 - z^k) for k = 0..m-1, index 0 unused"""
    factors = [CycloElement.scalar(m, 0)]
    for k in range(1, m):
        zk = CycloElement.zeta_power(m, k)
        factors.append((1 + zk) * (1 - zk).inverse())
    return tuple(factors)


@lru_cache(maxsize=None)
def _defect_for_ratio(m: int, q: int) -> Fraction:
    # substituting k -> k a^{-1} reduces (a, b) to (1, q)
    factors = _cotangent_factors(m)
    total = CycloElement.scalar(m, 0)
    for k in range(1, m):
        total = total + factors[k] * factors[k * q % m]
    return total.rational_value()


def defect_point(rn: RotationNumbers) -> Fraction:
    """
    Exact signature defect of an isolated fixed point

    Args:
        rn: Rotation numbers coprime to m

    Returns:
        Rational defect; an irrational residue raises InvariantViolation
    """
    _require_free(rn)
    return _defect_for_ratio(rn.m, rn.ratio())


def defect_point_numeric(rn: RotationNumbers) -> float:
    """Same sum evaluated term by term in complex floating point"""
    _require_free(rn)
    total = 0j
    for k in range(1, rn.m):
        za = cmath.exp(2j * math.pi * k * rn.a / rn.m)
        zb = cmath.exp(2j * math.pi * k * rn.b / rn.m)
        total += (1 + za) * (1 + zb) / ((1 - za) * (1 - zb))
    return total.real


def defect_surface(p: int, self_intersection: int) -> Fraction:
    """(p^2 - 1)/3 * C.C for a fixed surface of a Z/p action"""
    return Fraction(p * p - 1, 3) * self_intersection


def fixed_point_rotations(a: int, b: int, m: int) -> List[RotationNumbers]:
    """Weights at the three coordinate points of the linear action"""
    return [
        RotationNumbers(a, b, m),
        RotationNumbers(-a, b - a, m),
        RotationNumbers(-b, a - b, m),
    ]


@dataclass(frozen=True)
class GSignatureReport:
    a: int
    b: int
    m: int
    lhs: Fraction
    defects: Tuple[Fraction, ...]

    @property
    def holds(self) -> bool:
        return self.lhs == sum(self.defects, Fraction(0))

    def to_dict(self) -> Dict:
        from core.utils import format_fraction

        return {
            "a": self.a, "b": self.b, "m": self.m,
            "lhs": format_fraction(self.lhs),
            "defects": [format_fraction(d) for d in self.defects],
            "sum_defects": format_fraction(sum(self.defects, Fraction(0))),
            "holds": self.holds,
        }


def verify_gsignature_cp2(a: int, b: int, m: int) -> GSignatureReport:
    """
    Check m * sigma(M/G) - sigma(M) = sum of point defects on CP2

    Args:
        a, b: Weights of the linear action
        m: Odd order

    Returns:
        GSignatureReport; `holds` is the exact comparison
    """
    if m < 3 or m % 2 == 0:
        raise PreconditionError(f"The CP2 balance check needs odd m >= 3, got {m}")
    if math.gcd(a, m) != 1 or math.gcd(b, m) != 1 or math.gcd(a - b, m) != 1:
        raise PreconditionError(f"Weights a={a}, b={b}, a-b must be coprime to m={m}")
    lhs = Fraction(m * QUOTIENT_SIGNATURE - CP2_SIGNATURE)
    defects = tuple(defect_point(rn) for rn in fixed_point_rotations(a, b, m))
    report = GSignatureReport(a % m, b % m, m, lhs, defects)
    if not report.holds:
        logger.error(f"G-signature balance fails for (a,b,m)=({a},{b},{m}): {report.to_dict()}")
    return report


def valid_weights(m: int) -> Iterator[Tuple[int, int]]:
    """Every (a, b) mod m with a, b and a - b coprime to m"""
    for a in range(1, m):
        for b in range(1, m):
            if math.gcd(a, m) == 1 and math.gcd(b, m) == 1 and math.gcd(a - b, m) == 1:
                yield a, b


def gsignature_sweep(max_m: int) -> List[GSignatureReport]:
    """verify_gsignature_cp2 over all valid weights for odd 3 <= m <= max_m"""
    reports = []
    for m in range(3, max_m + 1, 2):
        for a, b in valid_weights(m):
            reports.append(verify_gsignature_cp2(a, b, m))
    logger.info(f"G-signature sweep to m={max_m}: {len(reports)} triples, "
                f"{sum(1 for r in reports if not r.holds)} failures")
    return reports
