"""
Odd-order cycle types: necessary checks and standard-linear certificates

A permutation of H_2(M_n) of odd order m is read through its cycle type.
The stabilizer of a d-cycle is the subgroup of order m/d in Z/m, so the
set S of stabilizer orders and the count mu of its maximal proper members
depend only on the cycle type.

Certificates are standard-linear trees: a root (a linear Z/m action on
S^4, optionally with chains of fixed CP2 copies at a pole, or a central
chain of fixed copies) and orbit nodes, each an orbit of d copies of CP2
attached along an orbit of size d of its parent.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple, Union

import sympy

from core.errors import InvariantViolation, PreconditionError
from core.g_signature import RotationNumbers
from core.signed_perm import CycleType
from core.utils import log_function
from core.verdict import CheckResult, Verdict, Witness

logger = logging.getLogger('Nielsen.HTOdd')

CITE_MU = "maximal stabilizers: mu <= max(2, 3 C_1) for realizable odd-order actions"
CITE_PRIME_CYCLES = "small prime cycles: P_n <= max(2, 3 C_1) with p <= (log n)^2"
CITE_TWO_MIN_PRIMES = "no fixed copies and two minimal prime lengths p, q: every other length is divisible by pq"
CITE_357 = "one fixed copy: lengths 3, 5 and 7 cannot occur together"
CITE_TWO_LENGTHS = "at most two nontrivial cycle lengths: orbits on two orthogonal circles of S^4"
CITE_SL_TREE = "standard-linear equivariant connected sum realizes the cycle type"


def orbit_order(x: int, m: int) -> int:
    """Order of x in Z/m"""
    return m // math.gcd(x, m)


@dataclass(frozen=True)
class StabilizerSet:
    m: int
    orders: FrozenSet[int]

    def __post_init__(self):
        if any(self.m % s for s in self.orders):
            raise PreconditionError(f"Stabilizer orders {sorted(self.orders)} must divide {self.m}")

    def maximal_proper(self) -> List[int]:
        proper = [s for s in self.orders if s != self.m]
        return sorted(s for s in proper if not any(t != s and t % s == 0 for t in proper))


def _require_odd(ct: CycleType) -> None:
    if not ct.is_odd():
        raise PreconditionError(f"Cycle type {ct} has an even part")


def stabilizer_set(ct: CycleType, m: Optional[int] = None) -> StabilizerSet:
    """
    Stabilizer orders m/d over the occurring cycle lengths d

    Args:
        ct: Odd cycle type
        m: Group order, defaults to the lcm of the parts
    """
    _require_odd(ct)
    m = ct.order if m is None else m
    if m % 2 == 0:
        raise PreconditionError(f"Group order {m} is even")
    if any(m % d for d in ct.parts):
        raise PreconditionError(f"Parts of {ct} do not all divide m = {m}")
    return StabilizerSet(m, frozenset(m // d for d in ct.parts))


def mu(ct: CycleType, m: Optional[int] = None) -> int:
    return len(stabilizer_set(ct, m).maximal_proper())


def check_mu(ct: CycleType) -> CheckResult:
    _require_odd(ct)
    value = mu(ct)
    c1 = ct.count(1)
    bound = max(2, 3 * c1)
    return CheckResult("mu", value <= bound, True,
                       {"mu": value, "C_1": c1, "bound": bound,
                        "maximal_stabilizers": stabilizer_set(ct).maximal_proper()},
                       CITE_MU)


def prime_threshold(n: int, log_base: str = "e") -> float:
    """(log n)^2"""
    return log_function(log_base)(n) ** 2 if n > 1 else 0.0


def prime_cycle_count(ct: CycleType, n: Optional[int] = None, log_base: str = "e") -> int:
    """Number of odd primes p <= (log n)^2 with a p-cycle"""
    n = ct.n if n is None else n
    threshold = prime_threshold(n, log_base)
    return sum(1 for p in ct.distinct_nontrivial()
               if p % 2 == 1 and p <= threshold and sympy.isprime(p))


def check_prime_cycles(ct: CycleType, n: Optional[int] = None, log_base: str = "e") -> CheckResult:
    _require_odd(ct)
    n = ct.n if n is None else n
    count = prime_cycle_count(ct, n, log_base)
    c1 = ct.count(1)
    bound = max(2, 3 * c1)
    threshold = prime_threshold(n, log_base)
    primes = [p for p in ct.distinct_nontrivial() if p <= threshold and sympy.isprime(p)]
    return CheckResult("prime_cycles", count <= bound, True,
                       {"P_n": count, "primes": primes, "threshold": round(threshold, 6),
                        "log_base": log_base, "C_1": c1, "bound": bound},
                       CITE_PRIME_CYCLES)


def minimal_lengths(ct: CycleType) -> List[int]:
    """Nontrivial lengths with no other nontrivial length dividing them"""
    lengths = ct.distinct_nontrivial()
    return [d for d in lengths if not any(e != d and d % e == 0 for e in lengths)]


def check_two_min_primes(ct: CycleType) -> CheckResult:
    _require_odd(ct)
    primes = [d for d in minimal_lengths(ct) if sympy.isprime(d)]
    if ct.count(1) != 0 or len(primes) < 2:
        return CheckResult("two_min_primes", True, False, {"minimal_primes": primes}, CITE_TWO_MIN_PRIMES)
    p, q = primes[0], primes[1]
    offending = [d for d in ct.distinct_nontrivial() if d not in (p, q) and d % (p * q)]
    return CheckResult("two_min_primes", not offending, True,
                       {"p": p, "q": q, "not_divisible_by_pq": offending},
                       CITE_TWO_MIN_PRIMES)


def check_357(ct: CycleType) -> CheckResult:
    _require_odd(ct)
    if ct.count(1) != 1:
        return CheckResult("no_357", True, False, {"C_1": ct.count(1)}, CITE_357)
    lengths = set(ct.distinct_nontrivial())
    return CheckResult("no_357", not {3, 5, 7} <= lengths, True,
                       {"C_1": 1, "lengths": sorted(lengths & {3, 5, 7})}, CITE_357)


def necessary_checks(ct: CycleType, n: Optional[int] = None, log_base: str = "e") -> List[CheckResult]:
    return [check_mu(ct), check_prime_cycles(ct, n, log_base), check_two_min_primes(ct), check_357(ct)]


def orbit_sizes_cp2(rn: RotationNumbers) -> Set[int]:
    """Orbit lengths of the linear Z/m action on CP2 with weights (a, b)"""
    m = rn.m
    return {1, m, orbit_order(rn.b, m), orbit_order(rn.a, m), orbit_order(rn.a - rn.b, m)}


def s4_initial_orbits(a: int, b: int, m: int) -> Set[int]:
    """Orbit lengths o(a), o(b) and lcm on the circles of S^4"""
    oa, ob = orbit_order(a, m), orbit_order(b, m)
    if math.lcm(oa, ob) != m:
        raise PreconditionError(f"S^4 weights ({a},{b}) are not faithful mod {m}")
    return {oa, ob, m}


# ----------------------------------------------------------------------------
# Standard-linear trees
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedCopy:
    """A CP2 copy fixed by the group, weights (x, y) at its gluing point"""
    x: int
    y: int

    def triples(self, m: int) -> List[Tuple[int, int]]:
        """Weights at its three fixed points; index 0 is the gluing point"""
        x, y = self.x, self.y
        return [(x % m, y % m), (-x % m, (y - x) % m), (-y % m, (x - y) % m)]

    def offers(self, m: int) -> Set[int]:
        ox, oy, oz = orbit_order(self.x, m), orbit_order(self.y, m), orbit_order(self.x - self.y, m)
        return {ox, oy, oz, math.lcm(ox, oy)} - {1}


def glue(weights: Tuple[int, int], m: int) -> FixedCopy:
    """Copy glued at a fixed point with weights (u, v) sees (-u, v)"""
    u, v = weights
    return FixedCopy(-u % m, v % m)


@dataclass(frozen=True)
class S4Root:
    a: int
    b: int
    m: int

    def slots(self) -> Set[int]:
        return s4_initial_orbits(self.a, self.b, self.m) - {1}


@dataclass(frozen=True)
class CentralCore:
    m: int
    copies: Tuple[FixedCopy, ...]

    def slots(self) -> Set[int]:
        result: Set[int] = set()
        for copy in self.copies:
            result |= copy.offers(self.m)
        return result


@dataclass(frozen=True)
class OrbitNode:
    """d copies permuted cyclically, stabilizer of order m/d acting with weights (alpha, beta)"""
    parent: int           # -1 for the root, else index of an earlier node
    orbit: int
    alpha: int = 0
    beta: int = 0

    def offers(self, m: int) -> Set[int]:
        s = m // self.orbit
        oa, ob, oab = orbit_order(self.alpha, s), orbit_order(self.beta, s), orbit_order(self.alpha - self.beta, s)
        return {self.orbit * u for u in {oa, ob, oab, math.lcm(oa, ob)} if u > 1}


@dataclass(frozen=True)
class SLTree:
    root: Union[S4Root, CentralCore]
    poles: Tuple[FixedCopy, ...] = ()
    nodes: Tuple[OrbitNode, ...] = ()

    @property
    def m(self) -> int:
        return self.root.m

    @property
    def fixed_copies(self) -> int:
        if isinstance(self.root, CentralCore):
            return len(self.root.copies)
        return len(self.poles)

    def root_slots(self) -> Set[int]:
        slots = set(self.root.slots())
        for copy in self.poles:
            slots |= copy.offers(self.m)
        return slots

    def depth(self, index: int) -> int:
        depth = 0
        while index >= 0:
            depth += 1
            index = self.nodes[index].parent
        return depth

    def validate(self) -> None:
        """
        Check gluing, attachment and faithfulness rules

        Raises:
            InvariantViolation: the tree breaks an orbit rule
        """
        m = self.m
        if isinstance(self.root, CentralCore):
            if self.poles:
                raise InvariantViolation("A central core carries no pole chain")
            _check_chain(self.root.copies, m, first_free=True)
        else:
            if self.poles:
                if self.poles[0] != glue((self.root.a, self.root.b), m):
                    raise InvariantViolation("First pole copy does not match the S^4 pole weights")
                _check_chain(self.poles, m, first_free=False)
        slots = self.root_slots()
        for i, node in enumerate(self.nodes):
            if m % node.orbit:
                raise InvariantViolation(f"Orbit {node.orbit} does not divide m = {m}")
            if node.parent == -1:
                if node.orbit not in slots:
                    raise InvariantViolation(f"Root offers no orbit of length {node.orbit}")
            else:
                if not 0 <= node.parent < i:
                    raise InvariantViolation(f"Node {i} has parent {node.parent}")
                if node.orbit not in self.nodes[node.parent].offers(m):
                    raise InvariantViolation(f"Node {node.parent} offers no orbit of length {node.orbit}")
        if not self.is_faithful():
            raise InvariantViolation(f"Tree is not faithful: lcm of cycle lengths != {m}")

    def is_faithful(self) -> bool:
        parts = self.cycle_parts()
        return bool(parts) and math.lcm(*parts) == self.m

    def cycle_parts(self) -> List[int]:
        return [1] * self.fixed_copies + [node.orbit for node in self.nodes]

    def to_dict(self) -> Dict:
        if isinstance(self.root, CentralCore):
            root = {"kind": "central_core", "m": self.m,
                    "copies": [[c.x, c.y] for c in self.root.copies]}
        else:
            root = {"kind": "s4", "m": self.m, "a": self.root.a, "b": self.root.b,
                    "poles": [[c.x, c.y] for c in self.poles]}
        return {
            "root": root,
            "nodes": [{"parent": nd.parent, "orbit": nd.orbit, "weights": [nd.alpha, nd.beta]}
                      for nd in self.nodes],
        }


def _check_chain(copies: Sequence[FixedCopy], m: int, first_free: bool) -> None:
    for i in range(1, len(copies)):
        previous = copies[i - 1].triples(m)
        free = previous if (i == 1 and first_free) else previous[1:]
        if copies[i] not in {glue(w, m) for w in free}:
            raise InvariantViolation(f"Fixed copy {i} is not glued at a free fixed point of copy {i - 1}")


def tree_to_cycle_type(tree: SLTree) -> CycleType:
    return CycleType(tuple(tree.cycle_parts()))


def _chains(start: FixedCopy, length: int, m: int, first_free: bool) -> Iterator[Tuple[FixedCopy, ...]]:
    """Chains of fixed copies beginning at `start`, deduplicated by offered orbits"""
    if length <= 0:
        yield ()
        return
    states = {(start, frozenset(start.offers(m)), True): (start,)}
    for _ in range(length - 1):
        nxt = {}
        for (last, offered, is_first), chain in states.items():
            triples = last.triples(m)
            free = triples if (is_first and first_free) else triples[1:]
            for w in free:
                copy = glue(w, m)
                key = (copy, offered | copy.offers(m), False)
                nxt.setdefault(key, chain + (copy,))
        states = nxt
    seen = set()
    for (_, offered, _), chain in states.items():
        if offered not in seen:
            seen.add(offered)
            yield chain


def sufficient_two_lengths(ct: CycleType) -> Optional[SLTree]:
    """
    Certificate for cycle types with at most two nontrivial lengths

    Nontrivial cycles are orbits on the two circles of an S^4 rotation;
    fixed copies hang in a chain from a pole.
    """
    _require_odd(ct)
    lengths = ct.distinct_nontrivial()
    if len(lengths) > 2:
        return None
    c1 = ct.count(1)
    if not lengths:
        if c1 == 0:
            return None
        return SLTree(CentralCore(1, (FixedCopy(0, 0),) * c1))
    m = ct.order
    k = lengths[0]
    ell = lengths[-1]
    root = S4Root(m // k % m, m // ell % m, m)
    poles = next(_chains(glue((root.a, root.b), m), c1, m, first_free=False))
    nodes = tuple(OrbitNode(-1, d) for d in ct.parts if d > 1)
    tree = SLTree(root, poles, nodes)
    tree.validate()
    return tree


def _divisors(m: int) -> List[int]:
    return sorted(int(d) for d in sympy.divisors(m))


def _root_candidates(m: int, c1: int) -> Iterator[Tuple[Union[S4Root, CentralCore], Tuple[FixedCopy, ...]]]:
    divisors = _divisors(m)
    pairs = [(d1, d2) for i, d1 in enumerate(divisors) for d2 in divisors[i:] if math.lcm(d1, d2) == m]
    for d1, d2 in pairs:
        root = S4Root(m // d1 % m, m // d2 % m, m)
        if c1 == 0:
            yield root, ()
        else:
            for poles in _chains(glue((root.a, root.b), m), c1, m, first_free=False):
                yield root, poles
    if c1 >= 1:
        for d in divisors:
            x = m // d % m
            for y in range(m):
                for copies in _chains(FixedCopy(x, y), c1, m, first_free=True):
                    yield CentralCore(m, copies), ()


class _Budget:
    def __init__(self, limit: int):
        self.remaining = limit

    def spend(self) -> bool:
        self.remaining -= 1
        return self.remaining >= 0


def _weight_candidates(orbit: int, m: int, needed: Set[int]) -> List[Tuple[int, int]]:
    """Weights (s/u1, s/u2) making the node offer the needed ratios u"""
    s = m // orbit
    ratios = sorted({u for u in needed if s % u == 0} | {1})
    candidates = []
    for i, u1 in enumerate(ratios):
        for u2 in ratios[i:]:
            candidates.append((s // u1 % s if s > 1 else 0, s // u2 % s if s > 1 else 0))
    candidates.sort(key=lambda w: -len({orbit * u for u in needed} & OrbitNode(0, orbit, *w).offers(m)))
    return candidates


def _attach(parts: List[int], nodes: List[OrbitNode], slots: Set[int], m: int,
            max_depth: int, budget: _Budget, depths: List[int]) -> Optional[List[OrbitNode]]:
    if not parts:
        return list(nodes)
    if not budget.spend():
        return None
    d, rest = parts[0], parts[1:]
    needed = {e // d for e in rest if e % d == 0 and e > d}
    parents = []
    if d in slots:
        parents.append(-1)
    for i, node in enumerate(nodes):
        if depths[i] < max_depth and d in node.offers(m):
            parents.append(i)
    for parent in parents:
        for alpha, beta in _weight_candidates(d, m, needed):
            nodes.append(OrbitNode(parent, d, alpha, beta))
            depths.append(1 if parent == -1 else depths[parent] + 1)
            result = _attach(rest, nodes, slots, m, max_depth, budget, depths)
            nodes.pop()
            depths.pop()
            if result is not None:
                return result
            if budget.remaining < 0:
                return None
    return None


def sl_search(ct: CycleType, n: Optional[int] = None, max_depth: int = 6,
              node_budget: int = 20000) -> Optional[SLTree]:
    """
    Bounded search for a standard-linear tree with cycle type ct

    Args:
        ct: Odd cycle type (padded with fixed points up to n)
        n: Ambient size
        max_depth: Longest root-to-node path
        node_budget: Search steps before giving up

    Returns:
        A validated SLTree or None; None makes no non-realizability claim
    """
    ct = CycleType.of(ct.parts, n)
    _require_odd(ct)
    c1 = ct.count(1)
    parts = sorted(d for d in ct.parts if d > 1)
    if not parts:
        return SLTree(CentralCore(1, (FixedCopy(0, 0),) * c1)) if c1 else None
    m = ct.order
    minimal = set(minimal_lengths(ct))
    budget = _Budget(node_budget)
    for root, poles in _root_candidates(m, c1):
        if not budget.spend():
            logger.debug(f"sl_search budget exhausted for {ct}")
            break
        candidate = SLTree(root, poles)
        slots = candidate.root_slots()
        if not minimal <= slots:
            continue
        nodes = _attach(parts, [], slots, m, max_depth, budget, [])
        if nodes is not None:
            tree = SLTree(root, poles, tuple(nodes))
            tree.validate()
            if tree_to_cycle_type(tree) != ct:
                raise InvariantViolation(f"Search produced {tree_to_cycle_type(tree)} for {ct}")
            return tree
        if budget.remaining < 0:
            logger.debug(f"sl_search budget exhausted for {ct}")
            break
    return None


def random_sltree(m_max: int, rng, max_nodes: int = 6, max_fixed: int = 2, attempts: int = 200) -> SLTree:
    """
    Random faithful standard-linear tree

    Args:
        m_max: Largest group order
        rng: numpy Generator
        max_nodes: Most orbit nodes
        max_fixed: Most fixed copies
    """
    odd_orders = list(range(1, m_max + 1, 2))
    for _ in range(attempts):
        m = int(rng.choice(odd_orders))
        c1 = int(rng.integers(0, max_fixed + 1))
        divisors = _divisors(m)
        if c1 == 0 or rng.random() < 0.5:
            pairs = [(d1, d2) for d1 in divisors for d2 in divisors if math.lcm(d1, d2) == m]
            d1, d2 = pairs[int(rng.integers(len(pairs)))]
            root = S4Root(m // d1 % m, m // d2 % m, m)
            poles = _random_chain(glue((root.a, root.b), m), c1, m, False, rng)
        else:
            x = m // int(rng.choice(divisors)) % m
            root = CentralCore(m, _random_chain(FixedCopy(x, int(rng.integers(m))), c1, m, True, rng))
            poles = ()
        tree = SLTree(root, poles)
        nodes: List[OrbitNode] = []
        for _ in range(int(rng.integers(0, max_nodes + 1))):
            parent = int(rng.integers(-1, len(nodes)))
            offers = sorted(tree.root_slots() if parent == -1 else nodes[parent].offers(m))
            if not offers:
                continue
            orbit = int(rng.choice(offers))
            s = m // orbit
            nodes.append(OrbitNode(parent, orbit, int(rng.integers(s)), int(rng.integers(s))))
        tree = SLTree(root, poles, tuple(nodes))
        if tree.is_faithful():
            tree.validate()
            return tree
    raise InvariantViolation(f"No faithful random tree after {attempts} attempts")


def _random_chain(start: FixedCopy, length: int, m: int, first_free: bool, rng) -> Tuple[FixedCopy, ...]:
    if length <= 0:
        return ()
    chain = [start]
    for i in range(1, length):
        triples = chain[-1].triples(m)
        free = triples if (i == 1 and first_free) else triples[1:]
        chain.append(glue(free[int(rng.integers(len(free)))], m))
    return tuple(chain)


def _certificate(tree: SLTree, ct: CycleType, construction: str) -> Dict:
    return {"kind": "standard_linear_tree", "construction": construction,
            "cycle_type": str(ct), "tree": tree.to_dict()}


def verdict_odd_element(ct: CycleType, n: Optional[int] = None, log_base: str = "e",
                        max_depth: int = 6, node_budget: int = 20000) -> Verdict:
    """
    Verdict for the cyclic group generated by an odd-order element

    Args:
        ct: Cycle type (padded with fixed points up to n)
        n: Ambient size
        log_base: Base of the logarithm in the small-prime threshold
        max_depth, node_budget: sl_search bounds

    Returns:
        NotRealizable with every failed check, Realizable with a tree, or Unknown
    """
    ct = CycleType.of(ct.parts, n)
    _require_odd(ct)
    if ct.n < 1:
        raise PreconditionError("Cycle type is empty")
    info = {"cycle_type": str(ct), "n": ct.n}

    failed = [c for c in necessary_checks(ct, ct.n, log_base) if c.fired]
    if failed:
        return Verdict.not_realizable([c.to_witness() for c in failed], info)

    tree = sufficient_two_lengths(ct)
    construction, citation = "two_lengths", CITE_TWO_LENGTHS
    if tree is None:
        tree = sl_search(ct, max_depth=max_depth, node_budget=node_budget)
        construction, citation = "sl_search", CITE_SL_TREE
    if tree is None:
        return Verdict.unknown(info)
    if tree_to_cycle_type(tree) != ct:
        raise InvariantViolation(f"Certificate emits {tree_to_cycle_type(tree)}, expected {ct}")
    return Verdict.realizable(_certificate(tree, ct, construction), info,
                              [Witness(construction, {"m": tree.m}, citation)])


def nonrealizable_witness(n: int) -> Optional[CycleType]:
    """
    An odd cycle type on n letters failing a necessary check

    None for n <= 8 (every odd cycle type is realizable there) and for
    sizes where no family applies.
    """
    if n >= 15 and n % 2 == 1:
        if (n - 8) % 15:
            return CycleType.of((3, 5, n - 8))
        return CycleType.of((3, 7, n - 10))
    if n == 16:
        return CycleType.of((1, 3, 5, 7))
    if n >= 18 and n % 2 == 0:
        return CycleType.of((3, 5, 7, n - 15))
    return None


def odd_cycle_types(n: int) -> Iterator[CycleType]:
    """Every cycle type on n letters with all parts odd"""
    def rec(remaining: int, cap: int) -> Iterator[Tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for part in range(min(cap, remaining), 0, -1):
            if part % 2:
                for rest in rec(remaining - part, part):
                    yield (part,) + rest
    for parts in rec(n, n):
        yield CycleType(parts)
