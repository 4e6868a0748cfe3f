"""
Verdict rules for explicit subgroups of O(n, Z)

Groups are given by full element lists (or closed from generators under a
size cap). The rules here cover 2-groups in S_n, abelian groups at odd n,
symmetric and alternating subgroups, and the fixed table of known
realizable and non-realizable families.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence

from core.errors import InvariantViolation, OracleLimitError, ParseError, PreconditionError
from core.signed_perm import (
    SignedPermutation, compose, cycle_type, is_odd_order, order, parse_element,
)
from core.utils import ceil_log2
from core.verdict import CheckResult, Status, Verdict, Witness

logger = logging.getLogger('Nielsen.SubgroupVerdicts')

DEFAULT_MAX_ORDER = 1 << 16

CITE_2GROUPS = "realizable 2-subgroups of S_n are generated by ceil(log2 n) + 5 elements"
CITE_ABELIAN_ODD = ("abelian H at odd n with an involution having an odd number of +1s "
                    "and 2-primary part needing 4 generators does not embed in SO(4)")
CITE_X_BLOCKS = "two commuting involutions at odd n: one of phi, psi, phi*psi has an odd number of +1s"
CITE_SYMMETRIC = "S_k on k of n letters with k - 2 > max(n/2, 5) is not realizable"
CITE_ALTERNATING = "A_n on all n letters is not realizable for n >= 10"
CITE_WHOLE_GROUP = "the whole group O(n, Z) is not realizable for n >= 4"
CITE_SMALL_CYCLIC = "all cyclic subgroups of O(n, Z) are realizable for n <= 3"
CITE_SMALL_SYMMETRIC = "S_n is realizable for n <= 5 by isometries of a simplex in S^4"
CITE_A6 = "A_6 is realizable on M_6 by isometries of a 5-simplex in S^4"


class ExplicitGroup:
    """Finite subgroup of O(n, Z) held as a full element list"""

    def __init__(self, n: int, elements: Iterable[SignedPermutation], max_order: int = DEFAULT_MAX_ORDER):
        self.n = n
        self.elements = tuple(dict.fromkeys(elements))
        self.max_order = max_order
        self._index = set(self.elements)
        if len(self.elements) > max_order:
            raise OracleLimitError(f"Group order {len(self.elements)} exceeds the cap {max_order}")
        if any(f.n != n for f in self.elements):
            raise PreconditionError(f"Every element must be a {n}x{n} signed permutation")
        if SignedPermutation.identity(n) not in self._index:
            raise PreconditionError("Element list does not contain the identity")
        self.generators = self._verify_closure()

    def _verify_closure(self) -> List[SignedPermutation]:
        """
        Greedy generating set; closed iff the list equals the subgroup it generates

        Raises:
            PreconditionError: the list is not closed under composition
        """
        generators: List[SignedPermutation] = []
        span = {SignedPermutation.identity(self.n)}
        for f in self.elements:
            if f in span:
                continue
            generators.append(f)
            span = _closure(self.n, generators, len(self.elements))
            if span is None or not span <= self._index:
                raise PreconditionError("Element list is not closed under composition")
        if len(span) != len(self.elements):
            raise InvariantViolation("Generated subgroup differs from the element list")
        return generators

    @classmethod
    def generated_by(cls, generators: Sequence[SignedPermutation], max_order: int = DEFAULT_MAX_ORDER) -> "ExplicitGroup":
        return close_group(generators, max_order)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, f: SignedPermutation) -> bool:
        return f in self._index

    def is_abelian(self) -> bool:
        return all(compose(g, h) == compose(h, g) for g in self.generators for h in self.generators)

    def is_cyclic(self) -> bool:
        return self.cyclic_generator() is not None

    def cyclic_generator(self) -> Optional[SignedPermutation]:
        for f in self.elements:
            if order(f) == self.order:
                return f
        return None

    def is_two_group(self) -> bool:
        return self.order & (self.order - 1) == 0

    def is_diagonal(self) -> bool:
        return all(f.is_diagonal() for f in self.generators)

    def is_plain(self) -> bool:
        """All elements are permutation matrices (no -1 signs)"""
        return all(all(s == 1 for s in f.sign) for f in self.generators)

    def moved_points(self) -> List[int]:
        return sorted({i for f in self.generators for i, j in enumerate(f.image, start=1) if i != j})

    def is_even_permutation_group(self) -> bool:
        return all(sum(length - 1 for length in cycle_type(f).parts) % 2 == 0 for f in self.generators)

    def center(self) -> List[SignedPermutation]:
        return [z for z in self.elements if all(compose(z, g) == compose(g, z) for g in self.generators)]

    def involutions(self) -> List[SignedPermutation]:
        return [f for f in self.elements if order(f) == 2]

    def two_primary_part(self) -> "ExplicitGroup":
        """Elements of 2-power order; a subgroup when the group is abelian"""
        if not self.is_abelian():
            raise PreconditionError("The 2-primary part is only taken for abelian groups")
        return ExplicitGroup(self.n, [f for f in self.elements if order(f) & (order(f) - 1) == 0], self.max_order)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "order": self.order, "generators": [str(g) for g in self.generators]}


def _closure(n: int, generators: Sequence[SignedPermutation], cap: int) -> Optional[set]:
    """Subgroup generated, or None once it exceeds cap elements"""
    identity = SignedPermutation.identity(n)
    seen = {identity}
    queue = deque([identity])
    while queue:
        f = queue.popleft()
        for g in generators:
            h = compose(f, g)
            if h not in seen:
                seen.add(h)
                if len(seen) > cap:
                    return None
                queue.append(h)
    return seen


def close_group(generators: Sequence[SignedPermutation], cap: int = DEFAULT_MAX_ORDER) -> ExplicitGroup:
    """
    Close a generating set into an ExplicitGroup

    Args:
        generators: Non-empty list of elements of the same size
        cap: Largest group order accepted

    Raises:
        OracleLimitError: the closure exceeds cap
    """
    if not generators:
        raise PreconditionError("close_group needs at least one generator")
    n = generators[0].n
    elements = _closure(n, generators, cap)
    if elements is None:
        raise OracleLimitError(f"Group generated by {len(generators)} elements exceeds {cap} elements")
    ordered = sorted(elements, key=lambda f: (f.image, f.sign))
    return ExplicitGroup(n, ordered, cap)


def parse_group_text(text: str) -> List[SignedPermutation]:
    """One element per line; blank lines and '#' comments ignored"""
    elements = []
    for raw in text.splitlines():
        line = raw.split('#', 1)[0].strip()
        if line:
            elements.append(parse_element(line))
    if not elements:
        raise ParseError("Group file lists no elements")
    return elements


def frattini_subgroup(P: ExplicitGroup) -> set:
    """Phi(P) for a 2-group: generated by the squares"""
    squares = list({compose(g, g) for g in P.elements})
    return _closure(P.n, squares, P.order)


def min_generators_2group(P: ExplicitGroup) -> int:
    """
    d(P) = log2 |P / Phi(P)|

    Raises:
        PreconditionError: |P| is not a power of 2
    """
    if not P.is_two_group():
        raise PreconditionError(f"Group of order {P.order} is not a 2-group")
    index = P.order // len(frattini_subgroup(P))
    return index.bit_length() - 1


def check_2group_generation_bound(P: ExplicitGroup, n: Optional[int] = None) -> CheckResult:
    n = P.n if n is None else n
    d = min_generators_2group(P)
    bound = ceil_log2(n) + 5
    return CheckResult("two_group_generators", d <= bound, True,
                       {"order": P.order, "d": d, "bound": bound}, CITE_2GROUPS)


def _odd_plus_count(f: SignedPermutation) -> bool:
    return f.diagonal_plus_count() % 2 == 1


def has_odd_involution(H: ExplicitGroup) -> Optional[SignedPermutation]:
    """An involution with an odd number of +1 diagonal entries, if any"""
    for f in H.involutions():
        if _odd_plus_count(f):
            return f
    return None


def check_x_blocks(phi: SignedPermutation, psi: SignedPermutation, n: Optional[int] = None) -> CheckResult:
    """
    At odd n one of phi, psi, phi*psi has an odd +1 diagonal count

    Applies to distinct commuting involutions; fails only if that is violated.
    """
    n = phi.n if n is None else n
    product = compose(phi, psi)
    applicable = (
        n % 2 == 1
        and phi != psi
        and order(phi) == 2 and order(psi) == 2
        and product == compose(psi, phi)
    )
    counts = {"phi": phi.diagonal_plus_count(), "psi": psi.diagonal_plus_count(),
              "phi_psi": product.diagonal_plus_count()}
    passed = any(c % 2 == 1 for c in counts.values())
    return CheckResult("x_blocks", passed or not applicable, applicable,
                       {"plus_counts": counts}, CITE_X_BLOCKS)


def verdict_abelian_odd_n(H: ExplicitGroup, n: Optional[int] = None) -> Verdict:
    """
    Abelian groups at odd n

    NotRealizable when H has an odd involution and d(H_2) >= 4, else Unknown.
    """
    n = H.n if n is None else n
    if n % 2 == 0:
        raise PreconditionError(f"verdict_abelian_odd_n needs odd n, got {n}")
    if not H.is_abelian():
        raise PreconditionError("verdict_abelian_odd_n needs an abelian group")
    info = {"n": n, "order": H.order, "abelian": True}
    involution = has_odd_involution(H)
    d = min_generators_2group(H.two_primary_part())
    if involution is not None and d >= 4:
        return Verdict.not_realizable(
            [Witness("abelian_odd_n",
                     {"involution": str(involution), "plus_count": involution.diagonal_plus_count(),
                      "two_primary_generators": d},
                     CITE_ABELIAN_ODD)],
            info,
        )
    return Verdict.unknown(info)


def _headline_certificate(fact: str, citation: str) -> Dict[str, Any]:
    return {"kind": "headline_fact", "fact": fact, "citation": citation}


def verdict_symmetric_subgroup(k: int, n: int) -> Verdict:
    """S_k permuting k of the n basis vectors"""
    if not 1 <= k <= n:
        raise PreconditionError(f"Need 1 <= k <= n, got k={k}, n={n}")
    info = {"group": f"S_{k}", "k": k, "n": n}
    if n >= 8 and k - 2 > max(n / 2, 5):
        return Verdict.not_realizable(
            [Witness("symmetric_subgroup", {"k": k, "n": n, "threshold": max(n / 2, 5)}, CITE_SYMMETRIC)],
            info,
        )
    if n <= 5:
        return Verdict.realizable(_headline_certificate(f"S_{k} <= S_{n} realizable", CITE_SMALL_SYMMETRIC),
                                  info, [Witness("small_symmetric", {"n": n}, CITE_SMALL_SYMMETRIC)])
    return Verdict.unknown(info)


def verdict_alternating_subgroup(k: int, n: int) -> Verdict:
    """A_k permuting k of the n basis vectors"""
    if not 1 <= k <= n:
        raise PreconditionError(f"Need 1 <= k <= n, got k={k}, n={n}")
    info = {"group": f"A_{k}", "k": k, "n": n}
    if k == n and n >= 10:
        return Verdict.not_realizable([Witness("alternating_group", {"n": n}, CITE_ALTERNATING)], info)
    if n <= 5:
        return Verdict.realizable(_headline_certificate(f"A_{k} <= S_{n} realizable", CITE_SMALL_SYMMETRIC),
                                  info, [Witness("small_symmetric", {"n": n}, CITE_SMALL_SYMMETRIC)])
    if k == 6 and n == 6:
        return Verdict.realizable(_headline_certificate("A_6 realizable on M_6", CITE_A6),
                                  info, [Witness("a6", {"n": 6}, CITE_A6)])
    return Verdict.unknown(info)


@dataclass(frozen=True)
class Fact:
    """A known realizability statement for a family of subgroups"""
    subject: str
    status: Status
    citation: str
    data: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"subject": self.subject, "status": self.status.value,
                "citation": self.citation, "data": self.data}


PLATONIC_VERTICES = {"tetrahedron": 4, "octahedron": 6, "cube": 8, "icosahedron": 12, "dodecahedron": 20}
POLYTOPE_4D_VERTICES = {"5-cell": 5, "16-cell": 8, "tesseract": 16, "24-cell": 24, "600-cell": 120, "120-cell": 600}
POLYTOPE_5D_VERTICES = {"5-orthoplex": 10, "5-cube": 32}


def headline_facts(n: int) -> List[Fact]:
    """
    Known facts about subgroups of O(n, Z) for this n

    Args:
        n: Number of CP2 summands

    Returns:
        Fact records with citations; data only, nothing is computed
    """
    from core.ht_odd import nonrealizable_witness

    if n < 1:
        raise PreconditionError(f"n must be positive, got {n}")
    R, NR = Status.REALIZABLE, Status.NOT_REALIZABLE
    facts: List[Fact] = []
    if n >= 4:
        facts.append(Fact(f"O({n},Z)", NR, CITE_WHOLE_GROUP))
    if n <= 3:
        facts.append(Fact("all cyclic subgroups of O(n,Z)", R, CITE_SMALL_CYCLIC))
    if n <= 8:
        facts.append(Fact(f"all cyclic subgroups of S_{n}", R,
                          "cycle types on at most 8 letters have at most two nontrivial lengths"))
    if n <= 5:
        facts.append(Fact(f"S_{n}", R, CITE_SMALL_SYMMETRIC))
    if n == 6:
        facts.append(Fact("A_6", R, CITE_A6))
    if n >= 8:
        facts.append(Fact(f"S_{n}", NR, CITE_SYMMETRIC, {"k": n}))
    if n >= 10:
        facts.append(Fact(f"A_{n}", NR, CITE_ALTERNATING))
    witness = nonrealizable_witness(n)
    if witness is not None:
        facts.append(Fact(f"cyclic subgroup of S_{n} with cycle type {witness}", NR,
                          "fails a necessary condition for odd-order realization",
                          {"cycle_type": str(witness)}))
    if n >= 2:
        facts.append(Fact(f"C_k x C_l on disjoint letters, k + l <= {n}", R,
                          "rotations of S^4 about two orthogonal circles"))
        facts.append(Fact(f"D_k x D_l on disjoint letters, k + l = {n}", R,
                          "rotations and reflections of two orthogonal circles in S^4"))
    for name, k in PLATONIC_VERTICES.items():
        if k <= n:
            facts.append(Fact(f"isometry group of the {name} on {k} letters", R,
                              "rigid motions of S^4 with CP2 summands at the vertices", {"vertices": k}))
    for name, k in POLYTOPE_4D_VERTICES.items():
        if k <= n:
            facts.append(Fact(f"orientation-preserving isometries of the {name} on {k} letters", R,
                              "rigid motions of S^4 with CP2 summands at the vertices", {"vertices": k}))
    for name, k in POLYTOPE_5D_VERTICES.items():
        if k == n:
            facts.append(Fact(f"orientation-preserving symmetries of the {name}", R,
                              "rigid motions of S^4 at the vertices of an inscribed polytope", {"vertices": k}))
    return facts


def verdict_signed_element(f: SignedPermutation, log_base: str = "e",
                           max_depth: int = 6, node_budget: int = 20000,
                           hinge_scope: str = "hub") -> Verdict:
    """
    Verdict for the cyclic subgroup generated by one element

    Args:
        f: Signed permutation

    Returns:
        Verdict from the small-n fact, the odd-order rules or the diagonal rules
    """
    from core.ht_odd import verdict_odd_element
    from core.subspaces import Subspace2, verdict_diagonal

    info = {"element": str(f), "n": f.n, "order": order(f)}
    if f.n <= 3:
        return Verdict.realizable(_headline_certificate("cyclic subgroups for n <= 3", CITE_SMALL_CYCLIC),
                                  info, [Witness("small_cyclic", {"n": f.n}, CITE_SMALL_CYCLIC)])
    if is_odd_order(f):
        verdict = verdict_odd_element(cycle_type(f), f.n, log_base, max_depth, node_budget)
    elif f.is_diagonal():
        verdict = verdict_diagonal(Subspace2.span(f.n, [f.diagonal_vector()]), hinge_scope=hinge_scope)
    else:
        return Verdict.unknown(info)
    verdict.input = {**info, **verdict.input}
    return verdict


def _combine(verdicts: List[Verdict], info: Dict[str, Any]) -> Verdict:
    negative = [v for v in verdicts if v.status == Status.NOT_REALIZABLE]
    positive = [v for v in verdicts if v.status == Status.REALIZABLE]
    if negative and positive:
        raise InvariantViolation(
            f"Rules disagree: {[w.rule for v in positive for w in v.witnesses]} realize, "
            f"{[w.rule for v in negative for w in v.witnesses]} obstruct"
        )
    if negative:
        return Verdict.not_realizable([w for v in negative for w in v.witnesses], info)
    if positive:
        first = positive[0]
        return Verdict.realizable(first.certificate, info, first.witnesses)
    return Verdict.unknown(info)


def verdict_group(G: ExplicitGroup, log_base: str = "e", max_depth: int = 6,
                  node_budget: int = 20000, hinge_scope: str = "hub") -> Verdict:
    """
    Run every rule that applies to G and merge the results

    Args:
        G: Explicit subgroup of O(n, Z)

    Returns:
        NotRealizable with all firing witnesses, Realizable with the first
        certificate found, or Unknown
    """
    from core.subspaces import Subspace2, verdict_diagonal

    n = G.n
    info = {"n": n, "order": G.order, "abelian": G.is_abelian(), "generators": [str(g) for g in G.generators]}
    verdicts: List[Verdict] = []

    if G.is_diagonal():
        H = Subspace2.span(n, [f.diagonal_vector() for f in G.generators])
        verdicts.append(verdict_diagonal(H, hinge_scope=hinge_scope))

    if n >= 4 and G.order == (2 ** n) * math.factorial(n):
        verdicts.append(Verdict.not_realizable([Witness("whole_group", {"n": n}, CITE_WHOLE_GROUP)]))

    generator = G.cyclic_generator()
    if generator is not None:
        verdicts.append(verdict_signed_element(generator, log_base, max_depth, node_budget, hinge_scope))

    if G.is_plain():
        moved = G.moved_points()
        k = len(moved)
        if k >= 2 and G.order == math.factorial(k):
            verdicts.append(verdict_symmetric_subgroup(k, n))
        elif k >= 3 and G.order == math.factorial(k) // 2 and G.is_even_permutation_group():
            verdicts.append(verdict_alternating_subgroup(k, n))
        if G.is_two_group():
            check = check_2group_generation_bound(G, n)
            if check.fired:
                verdicts.append(Verdict.not_realizable([check.to_witness()]))

    if n % 2 == 1 and G.is_abelian():
        verdicts.append(verdict_abelian_odd_n(G, n))

    result = _combine(verdicts, info)
    logger.debug(f"verdict_group order={G.order} n={n}: {result.status.value} via {result.rules}")
    return result
