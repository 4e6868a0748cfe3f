"""
Fixed-set arithmetic for prime-order actions on H_2

Edmonds invariants (t, c, r), the Euler characteristic and Betti
constraints they impose on the fixed set, the signature balance for
involutions and the rank bounds coming from fixed components.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Set, Tuple

import sympy

from core.errors import PreconditionError
from core.signed_perm import SignedPermutation, order, signed_cycle_type
from core.utils import v2

logger = logging.getLogger('Nielsen.FixedPoints')


# Strict upper bounds c(kind): a rank-m elementary abelian 2-group fixing a
# component of this kind with k components in its orbit needs m < c + v2(k).
# Entries are upper bounds only; N3 and N4 are not known to be sharp.
SURFACE_RANK_CONSTANTS: Dict[str, Dict] = {
    "point": {"c": 4, "source": "tangent representation embeds in SO(4), rank <= 3"},
    "S2": {"c": 3, "source": "finite 2-subgroups of Isom(S^2) faithful on a sphere have rank <= 2"},
    "RP2": {"c": 4, "source": "lift to the orientation double cover S^2 adds at most one"},
    "T2": {"c": 5, "source": "torus rank <= 4 for elementary abelian 2-groups"},
    "N2": {"c": 6, "source": "Klein bottle via orientation double cover T^2 adds at most one"},
    "Sigma2": {"c": 7, "source": "|Isom+| <= 84(g-1) for genus 2 bounds the rank by 6"},
    "N3": {"c": 8, "source": "double cover Sigma2 adds at most one (not sharp)"},
    "N4": {"c": 8, "source": "general bound c < 8 (not sharp)"},
}
SURFACE_KINDS = tuple(SURFACE_RANK_CONSTANTS)


@dataclass(frozen=True)
class EdmondsInvariants:
    """Multiplicities of trivial, cyclotomic and regular summands"""
    p: int
    t: int
    c: int
    r: int

    def __post_init__(self):
        if not sympy.isprime(self.p):
            raise PreconditionError(f"Edmonds invariants need a prime order, got {self.p}")
        if min(self.t, self.c, self.r) < 0:
            raise PreconditionError("Summand counts must be non-negative")

    @property
    def n(self) -> int:
        return self.t + self.c * (self.p - 1) + self.r * self.p

    def to_dict(self) -> Dict[str, int]:
        return {"p": self.p, "t": self.t, "c": self.c, "r": self.r}


@dataclass(frozen=True)
class FixedProfile:
    """Isolated fixed points plus the mod-p first Betti numbers of fixed surfaces"""
    isolated_points: int
    surfaces: Tuple[int, ...] = field(default_factory=tuple)

    def satisfies(self, inv: EdmondsInvariants) -> bool:
        if self.isolated_points + 2 * len(self.surfaces) != inv.t + 2:
            return False
        if not self.surfaces:
            return inv.c == 0
        return sum(self.surfaces) == inv.c


def edmonds_invariants(f: SignedPermutation, p: int) -> EdmondsInvariants:
    """
    (t, c, r) of the Z/p representation generated by f

    Args:
        f: Element of order exactly p
        p: Prime

    Returns:
        EdmondsInvariants with t + c(p-1) + rp = n
    """
    if order(f) != p:
        raise PreconditionError(f"Element has order {order(f)}, not {p}")
    cycles = signed_cycle_type(f).cycles
    if p == 2:
        t = sum(1 for length, parity in cycles if length == 1 and parity == 0)
        c = sum(1 for length, parity in cycles if length == 1 and parity == 1)
        r = sum(1 for length, _ in cycles if length == 2)
        inv = EdmondsInvariants(2, t, c, r)
    else:
        # odd order: conjugate to the plain permutation, signs carry no data
        t = sum(1 for length, _ in cycles if length == 1)
        r = sum(1 for length, _ in cycles if length == p)
        inv = EdmondsInvariants(p, t, 0, r)
    if inv.n != f.n:
        raise PreconditionError(f"Invariants {inv.to_dict()} do not add up to n = {f.n}")
    return inv


def euler_char_fixed(inv: EdmondsInvariants) -> int:
    """chi(M^G) = t - c + 2; nonzero forces a fixed point"""
    return inv.t - inv.c + 2


def feasible_fixed_profiles(inv: EdmondsInvariants) -> Set[Tuple[int, int]]:
    """
    All (k, s) = (isolated points, surfaces) allowed by the Betti constraints

    k + 2s = t + 2 and a positive c needs at least one surface.
    """
    total = inv.t + 2
    return {
        (total - 2 * s, s)
        for s in range(total // 2 + 1)
        if not (s == 0 and inv.c > 0)
    }


def fixed_profiles(inv: EdmondsInvariants, limit: int = 1000) -> Iterator[FixedProfile]:
    """
    Enumerate concrete profiles, distributing c over the surfaces

    Surface Betti numbers are listed non-increasing; at most `limit` profiles.
    """
    emitted = 0
    for k, s in sorted(feasible_fixed_profiles(inv), reverse=True):
        for betti in _partitions_into(inv.c, s):
            yield FixedProfile(k, betti)
            emitted += 1
            if emitted >= limit:
                return


def _partitions_into(total: int, parts: int, cap: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Non-increasing tuples of `parts` non-negative integers summing to total"""
    if parts == 0:
        if total == 0:
            yield ()
        return
    cap = total if cap is None else cap
    for first in range(min(total, cap), -1, -1):
        if first * parts < total:
            break
        for rest in _partitions_into(total - first, parts - 1, first):
            yield (first,) + rest


def gsig_balance_involution(f: SignedPermutation) -> int:
    """
    Required total self-intersection of fixed surfaces of an involution

    Point defects vanish for p = 2 and each surface contributes C.C,
    so sum C.C = 2 sigma(M/G) - sigma(M) = 2(t + r) - n.
    """
    inv = edmonds_invariants(f, 2)
    return 2 * (inv.t + inv.r) - f.n


@dataclass(frozen=True)
class FreeInvolutionReport:
    n: int
    invariants: EdmondsInvariants
    euler_constraint: str
    signature_constraint: str
    derived_identity: str
    euler_holds: bool
    signature_holds: bool
    inconsistent: bool

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "invariants": self.invariants.to_dict(),
            "constraints": [self.euler_constraint, self.signature_constraint],
            "derived_identity": self.derived_identity,
            "euler_holds": self.euler_holds,
            "signature_holds": self.signature_holds,
            "inconsistent": self.inconsistent,
        }


def _free_solutions(n: int) -> List[Tuple[int, int, int]]:
    """(t, c, r) with t + c + 2r = n, t + 2 = c and 2(t + r) = n"""
    solutions = []
    for r in range(n // 2 + 1):
        for t in range(n - 2 * r + 1):
            c = n - 2 * r - t
            if t + 2 == c and 2 * (t + r) == n:
                solutions.append((t, c, r))
    return solutions


def free_involution_report(f: SignedPermutation) -> FreeInvolutionReport:
    """
    Why no involution acting as f can be free

    A free action has empty fixed set (t + 2 = c) and multiplicative
    signature (t + r = n/2). Together with t + c + 2r = n the first gives
    n = 2(t + r + 1), which contradicts the second.
    """
    inv = edmonds_invariants(f, 2)
    n = f.n
    solutions = _free_solutions(n)
    report = FreeInvolutionReport(
        n=n,
        invariants=inv,
        euler_constraint="chi(M^G) = 0  <=>  t + 2 = c",
        signature_constraint="sigma(M) = 2 sigma(M/G)  <=>  t + r = n/2",
        derived_identity="n = 2(t + r + 1)",
        euler_holds=inv.t + 2 == inv.c,
        signature_holds=2 * (inv.t + inv.r) == n,
        inconsistent=not solutions,
    )
    if solutions:
        logger.error(f"Free involution constraints satisfiable at n={n}: {solutions}")
    return report


def rank_bound_from_fixed_data(kind: str, k: int) -> int:
    """
    Strict upper bound on the rank of (Z/2)^m fixing a component of `kind`

    Args:
        kind: 'point' or a surface name from SURFACE_KINDS
        k: Number of components in the orbit

    Returns:
        c(kind) + v2(k); realizable ranks are strictly below it
    """
    if kind not in SURFACE_RANK_CONSTANTS:
        raise PreconditionError(f"Unknown fixed component kind '{kind}'; expected one of {SURFACE_KINDS}")
    return SURFACE_RANK_CONSTANTS[kind]["c"] + v2(k)


def min_orbit_size(rank: int, k: int) -> int:
    """Smallest orbit of a rank-`rank` group on k components: 2^max(0, rank - v2(k))"""
    return 2 ** max(0, rank - v2(k))


def edmonds_report(f: SignedPermutation, p: Optional[int] = None) -> Dict:
    """Invariants, Euler characteristic and feasible profiles as a JSON-ready dict"""
    if p is None:
        p = order(f)
    inv = edmonds_invariants(f, p)
    chi = euler_char_fixed(inv)
    report = {
        "invariants": inv.to_dict(),
        "euler_characteristic": chi,
        "fixed_set_nonempty": chi != 0,
        "feasible_profiles": [{"isolated_points": k, "surfaces": s}
                              for k, s in sorted(feasible_fixed_profiles(inv))],
    }
    if p == 2:
        report["surface_self_intersection_total"] = gsig_balance_involution(f)
        report["free_action"] = free_involution_report(f).to_dict()
    return report


def prime_order_elements(n: int) -> Iterator[Tuple[SignedPermutation, int]]:
    """Every element of O(n, Z) of prime order, paired with that prime"""
    from core.signed_perm import all_signed_permutations

    for f in all_signed_permutations(n):
        k = order(f)
        if k > 1 and sympy.isprime(k):
            yield f, k


def involutions(n: int) -> Iterator[SignedPermutation]:
    return (f for f, p in prime_order_elements(n) if p == 2)
