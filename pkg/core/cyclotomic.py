"""
Exact arithmetic in Q(zeta_m) = Q[x] / Phi_m

Polynomials are dense coefficient tuples, constant term first, over
Fraction. Phi_m is built by dividing x^m - 1 by Phi_d for the proper
divisors d of m.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Tuple, Union

from core.errors import InvariantViolation, PreconditionError

Scalar = Union[int, Fraction]


def _trim(coeffs: Iterable[Scalar]) -> Tuple[Fraction, ...]:
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True, init=False)
class RationalPoly:
    """Polynomial over Q; RationalPoly(1, 0, 1) is x^2 + 1"""
    coeffs: Tuple[Fraction, ...]

    def __init__(self, *coeffs: Scalar):
        object.__setattr__(self, 'coeffs', _trim(coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Scalar]) -> "RationalPoly":
        return cls(*coeffs)

    @classmethod
    def monomial(cls, degree: int, c: Scalar = 1) -> "RationalPoly":
        return cls(*([0] * degree + [c]))

    def deg(self) -> int:
        """Degree; -1 for the zero polynomial"""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        other = _as_poly(other)
        return RationalPoly(*(c + d for c, d in itertools.zip_longest(self.coeffs, other.coeffs, fillvalue=0)))

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        other = _as_poly(other)
        return RationalPoly(*(c - d for c, d in itertools.zip_longest(self.coeffs, other.coeffs, fillvalue=0)))

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(*(-c for c in self.coeffs))

    def __mul__(self, other: Union["RationalPoly", Scalar]) -> "RationalPoly":
        if isinstance(other, (int, Fraction)):
            return RationalPoly(*(c * other for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return RationalPoly()
        result = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            for j, d in enumerate(other.coeffs):
                result[i + j] += c * d
        return RationalPoly(*result)

    __radd__ = __add__
    __rmul__ = __mul__

    def __divmod__(self, divisor: "RationalPoly") -> Tuple["RationalPoly", "RationalPoly"]:
        """Quotient and remainder with deg(remainder) < deg(divisor)"""
        if divisor.is_zero():
            raise ZeroDivisionError("Polynomial division by zero")
        quotient = [Fraction(0)] * max(0, self.deg() - divisor.deg() + 1)
        remainder = list(self.coeffs)
        lead = divisor.lead()
        for shift in range(len(quotient) - 1, -1, -1):
            t = remainder[shift + divisor.deg()] / lead
            quotient[shift] = t
            if t:
                for j, d in enumerate(divisor.coeffs):
                    remainder[shift + j] -= t * d
        return RationalPoly(*quotient), RationalPoly(*remainder)

    def __mod__(self, divisor: "RationalPoly") -> "RationalPoly":
        return divmod(self, divisor)[1]

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.deg(), -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            power = "" if i == 0 else "x" if i == 1 else f"x^{i}"
            magnitude = abs(c)
            body = str(magnitude) if (magnitude != 1 or not power) else ""
            sign = "-" if c < 0 else "+"
            terms.append((sign, body + power))
        first_sign, first = terms[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, term in terms[1:]:
            text += f" {sign} {term}"
        return text


def _as_poly(value) -> RationalPoly:
    if isinstance(value, RationalPoly):
        return value
    return RationalPoly(value)


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> RationalPoly:
    """
    The m-th cyclotomic polynomial

    Args:
        m: Positive integer

    Returns:
        Phi_m with integer coefficients
    """
    if m < 1:
        raise PreconditionError(f"Cyclotomic polynomial needs m >= 1, got {m}")
    poly = RationalPoly(-1, *([0] * (m - 1)), 1)
    for d in range(1, m):
        if m % d == 0:
            poly, remainder = divmod(poly, cyclotomic_poly(d))
            if not remainder.is_zero():
                raise InvariantViolation(f"Phi_{d} does not divide x^{m} - 1")
    if any(c.denominator != 1 for c in poly.coeffs):
        raise InvariantViolation(f"Phi_{m} has non-integer coefficients")
    return poly


def poly_gcdext(a: RationalPoly, b: RationalPoly) -> Tuple[RationalPoly, RationalPoly, RationalPoly]:
    """
    Extended Euclid over Q[x]

    Returns:
        (g, s, t) with s*a + t*b = g and g monic
    """
    r0, r1 = a, b
    s0, s1 = RationalPoly(1), RationalPoly()
    t0, t1 = RationalPoly(), RationalPoly(1)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    scale = 1 / r0.lead()
    return r0 * scale, s0 * scale, t0 * scale


@dataclass(frozen=True)
class CycloElement:
    """Residue modulo Phi_m, coefficients of 1, x, ..., x^(deg - 1)"""
    m: int
    poly: RationalPoly

    def __post_init__(self):
        modulus = cyclotomic_poly(self.m)
        if self.poly.deg() >= modulus.deg():
            object.__setattr__(self, 'poly', self.poly % modulus)

    @classmethod
    def scalar(cls, m: int, value: Scalar) -> "CycloElement":
        return cls(m, RationalPoly(value))

    @classmethod
    def zeta_power(cls, m: int, k: int) -> "CycloElement":
        """zeta_m^k; x^m = 1 in the quotient so k is read mod m"""
        return cls(m, RationalPoly.monomial(k % m))

    @property
    def coefficients(self) -> Tuple[Fraction, ...]:
        degree = cyclotomic_poly(self.m).deg()
        return self.poly.coeffs + (Fraction(0),) * (degree - len(self.poly.coeffs))

    def _check(self, other: "CycloElement") -> None:
        if other.m != self.m:
            raise PreconditionError(f"Mixing Q(zeta_{self.m}) with Q(zeta_{other.m})")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloElement.scalar(self.m, other)
        self._check(other)
        return CycloElement(self.m, self.poly + other.poly)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloElement.scalar(self.m, other)
        self._check(other)
        return CycloElement(self.m, self.poly - other.poly)

    def __rsub__(self, other):
        return CycloElement.scalar(self.m, other) - self

    def __neg__(self):
        return CycloElement(self.m, -self.poly)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElement(self.m, self.poly * other)
        self._check(other)
        return CycloElement(self.m, self.poly * other.poly)

    __radd__ = __add__
    __rmul__ = __mul__

    def inverse(self) -> "CycloElement":
        """Inverse via extended Euclid against Phi_m"""
        if self.is_zero():
            raise ZeroDivisionError(f"Zero has no inverse in Q(zeta_{self.m})")
        g, s, _ = poly_gcdext(self.poly, cyclotomic_poly(self.m))
        if g.deg() != 0:
            raise InvariantViolation(f"Residue shares a factor with Phi_{self.m}")
        return CycloElement(self.m, s)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElement(self.m, self.poly * (Fraction(1) / other))
        return self * other.inverse()

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def is_rational(self) -> bool:
        return self.poly.deg() <= 0

    def rational_value(self) -> Fraction:
        """The element as a rational; raises when a higher coefficient survives"""
        if not self.is_rational():
            raise InvariantViolation(f"Residue {self.poly} in Q(zeta_{self.m}) is not rational")
        return self.poly.coeffs[0] if self.poly.coeffs else Fraction(0)
