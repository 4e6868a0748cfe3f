"""
CP2-trees and the sign characters they induce

A CP2-tree records how copies of CP2 (one per basis vector of H_2) are
connect-summed. Every copy carries the linear (Z/2)^3 action generated by
f_X, f_Y and J; a copy's character chi_v is the 3-bit mask of generators
acting by -1 on its hyperplane class (bit 0 = f_X, bit 1 = f_Y, bit 2 = J).

Propagation along an edge:
  trivial edge at any point:      chi_child = chi_parent
  hinge edge at coordinate point W: chi_child = chi_parent XOR lambda_W
with lambda_X = f_Y + J, lambda_Y = f_X + J, lambda_Z = f_X + f_Y + J,
and chi_base = J. On the all-hinge star this gives
  (f_X)_* = diag(+1, +1, -1, -1) on (center, M_X, M_Y, M_Z).

Frames are aligned across edges: the child is glued at the same
coordinate point as the parent.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from core.errors import ParseError, PreconditionError
from core.subspaces import Subspace2, canonical_form, canonical_key
from core.utils import log_duration

logger = logging.getLogger('Nielsen.CP2Trees')

POINTS = ("X", "Y", "Z")
TRIVIAL = "trivial"
HINGE = "hinge"
KINDS = (TRIVIAL, HINGE)

F_X, F_Y, J = 1, 2, 4
FULL_GENERATORS = (F_X, F_Y, J)
LAMBDA = {"X": F_Y | J, "Y": F_X | J, "Z": F_X | F_Y | J}
BASE_CHARACTER = J

DEFAULT_ANY_MAX_VERTICES = 8


def generator_name(g: int) -> str:
    """Product notation for an element of (Z/2)^3, e.g. 'J*fX'"""
    names = [name for bit, name in ((J, "J"), (F_X, "fX"), (F_Y, "fY")) if g & bit]
    return "*".join(names) if names else "1"


@dataclass(frozen=True)
class CP2Edge:
    parent: int
    child: int
    kind: str
    parent_point: str
    child_point: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"Edge kind must be trivial or hinge, got {self.kind}")
        if self.parent_point not in POINTS or self.child_point not in POINTS:
            raise PreconditionError(f"Attachment points must be X, Y or Z")


@dataclass(frozen=True)
class CP2Tree:
    """Vertices 1..n, edges, and the base vertex"""
    n: int
    edges: Tuple[CP2Edge, ...]
    base: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'edges', tuple(self.edges))

    def validate(self, allow_mismatch: bool = False) -> None:
        """
        Check tree shape, point usage and frame alignment

        Raises:
            PreconditionError: malformed tree
        """
        if self.n < 1:
            raise PreconditionError("A CP2-tree needs at least one vertex")
        if not 1 <= self.base <= self.n:
            raise PreconditionError(f"Base vertex {self.base} outside 1..{self.n}")
        if len(self.edges) != self.n - 1:
            raise PreconditionError(f"{len(self.edges)} edges cannot connect {self.n} vertices as a tree")
        used: Dict[int, Set[str]] = {v: set() for v in range(1, self.n + 1)}
        for e in self.edges:
            for v, point in ((e.parent, e.parent_point), (e.child, e.child_point)):
                if v not in used:
                    raise PreconditionError(f"Edge endpoint {v} outside 1..{self.n}")
                if point in used[v]:
                    raise PreconditionError(f"Point {point} used twice at vertex {v}")
                used[v].add(point)
            if not allow_mismatch and e.parent_point != e.child_point:
                raise PreconditionError(
                    f"Edge {e.parent}-{e.child} glues {e.parent_point} to {e.child_point}; frames must align"
                )
        if len(self._reach()) != self.n:
            raise PreconditionError("Edges do not connect every vertex")

    def _adjacency(self) -> Dict[int, List[Tuple[int, CP2Edge]]]:
        adj: Dict[int, List[Tuple[int, CP2Edge]]] = {v: [] for v in range(1, self.n + 1)}
        for e in self.edges:
            adj[e.parent].append((e.child, e))
            adj[e.child].append((e.parent, e))
        return adj

    def _reach(self) -> List[int]:
        adj = self._adjacency()
        seen, queue = {self.base}, deque([self.base])
        while queue:
            v = queue.popleft()
            for w, _ in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return sorted(seen)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in (e.parent, e.child))

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "base": self.base,
            "edges": [
                {"parent": e.parent, "child": e.child, "kind": e.kind, "point": e.parent_point}
                for e in self.edges
            ],
        }

    def to_text(self) -> str:
        lines = [f"base {self.base}"]
        lines += [f"{e.parent} {e.child} {e.kind} {e.parent_point}" for e in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CP2Tree":
        """Parse 'parent child kind point' lines plus an optional 'base v' line"""
        edges, base, vertices = [], 1, {1}
        for raw in text.splitlines():
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if tokens[0] == "base" and len(tokens) == 2:
                base = int(tokens[1])
                vertices.add(base)
                continue
            if len(tokens) != 4:
                raise ParseError(f"Tree line '{raw}' is not 'parent child kind point'")
            try:
                parent, child = int(tokens[0]), int(tokens[1])
            except ValueError as e:
                raise ParseError(f"Bad vertex in '{raw}'") from e
            point = tokens[3].upper()
            edges.append(CP2Edge(parent, child, tokens[2].lower(), point, point))
            vertices.update((parent, child))
        tree = cls(max(vertices), tuple(edges), base)
        tree.validate()
        return tree


@dataclass(frozen=True)
class CharacterAssignment:
    """chi_v for every vertex, as 3-bit masks"""
    characters: Tuple[int, ...]   # index v-1

    def chi(self, v: int) -> int:
        return self.characters[v - 1]

    def value(self, v: int, g: int) -> int:
        """chi_v(g) in F2: 1 when g acts by -1 on copy v"""
        return (self.characters[v - 1] & g).bit_count() & 1


def propagate(tree: CP2Tree) -> CharacterAssignment:
    """
    Characters of all copies from the base outward

    Args:
        tree: A valid CP2-tree

    Returns:
        CharacterAssignment with chi_base = J
    """
    tree.validate()
    adj = tree._adjacency()
    chars: Dict[int, int] = {tree.base: BASE_CHARACTER}
    queue = deque([tree.base])
    while queue:
        v = queue.popleft()
        for w, e in adj[v]:
            if w in chars:
                continue
            chars[w] = chars[v] ^ (LAMBDA[e.parent_point] if e.kind == HINGE else 0)
            queue.append(w)
    return CharacterAssignment(tuple(chars[v] for v in range(1, tree.n + 1)))


def realized_subgroup(tree: CP2Tree, generators: Sequence[int] = FULL_GENERATORS) -> Subspace2:
    """Image of the chosen generators of (Z/2)^3 in G_n"""
    chars = propagate(tree)
    vectors = []
    for g in generators:
        if not 0 <= g < 8:
            raise PreconditionError(f"Generator {g} is not an element of (Z/2)^3")
        vectors.append(sum(1 << (v - 1) for v in range(1, tree.n + 1) if chars.value(v, g)))
    return Subspace2.span(tree.n, vectors)


class _TreeBuilder:
    """Incremental tree construction with point bookkeeping"""

    def __init__(self, n: int, base: int):
        self.n = n
        self.base = base
        self.edges: List[CP2Edge] = []
        self.used: Dict[int, Set[str]] = {v: set() for v in range(1, n + 1)}

    def free_points(self, v: int) -> List[str]:
        return [p for p in POINTS if p not in self.used[v]]

    def attach(self, parent: int, child: int, kind: str, point: str) -> None:
        if point in self.used[parent] or point in self.used[child]:
            raise PreconditionError(f"Point {point} unavailable for edge {parent}-{child}")
        self.used[parent].add(point)
        self.used[child].add(point)
        self.edges.append(CP2Edge(parent, child, kind, point, point))

    def chain(self, start: int, vertices: Sequence[int], avoid: Iterable[str] = ()) -> None:
        """Trivial chain start - v1 - v2 ..., leaving `avoid` free at start"""
        avoid = set(avoid)
        previous = start
        for v in vertices:
            options = [p for p in self.free_points(previous) if p not in avoid or previous != start]
            self.attach(previous, v, TRIVIAL, options[0])
            previous = v

    def chain_avoiding(self, start: int, vertices: Sequence[int], keep_free: str) -> None:
        """Trivial chain that keeps keep_free unused at its first vertex"""
        previous = start
        for i, v in enumerate(vertices):
            options = self.free_points(previous)
            if previous == start:
                options = [p for p in options if p != keep_free] or options
            self.attach(previous, v, TRIVIAL, options[0])
            previous = v

    def build(self) -> CP2Tree:
        tree = CP2Tree(self.n, tuple(self.edges), self.base)
        tree.validate()
        return tree


def realize_rank2(H: Subspace2) -> Tuple[CP2Tree, Tuple[int, ...]]:
    """
    Chain-and-hinge tree realizing a subgroup of rank at most 2

    With H = <phi, psi> split the coordinates into
    A = S_phi - S_psi, B = S_psi - S_phi, C = S_phi & S_psi, D = the rest.

    Args:
        H: Subspace of rank <= 2

    Returns:
        (tree, generators) with realized_subgroup(tree, generators) == H
    """
    if H.rank > 2:
        raise PreconditionError(f"realize_rank2 needs rank <= 2, got {H.rank}")
    n = H.n
    if n < 1:
        raise PreconditionError("realize_rank2 needs n >= 1")
    vertices = list(range(1, n + 1))

    if H.rank == 0:
        builder = _TreeBuilder(n, 1)
        builder.chain(1, vertices[1:])
        return builder.build(), ()

    phi = H.basis[0]
    psi = H.basis[1] if H.rank == 2 else 0
    members = lambda vec: [v for v in vertices if (vec >> (v - 1)) & 1]
    A = [v for v in members(phi) if not (psi >> (v - 1)) & 1]
    B = [v for v in members(psi) if not (phi >> (v - 1)) & 1]
    C = [v for v in members(phi) if (psi >> (v - 1)) & 1]
    D = [v for v in vertices if not ((phi | psi) >> (v - 1)) & 1]

    if D:
        base = D[0]
        builder = _TreeBuilder(n, base)
        generators = (F_X, F_Y) if H.rank == 2 else (F_X,)
        if A:
            builder.attach(base, A[0], HINGE, "Y")
        if B:
            builder.attach(base, B[0], HINGE, "X")
        free = builder.free_points(base)
        rest = D[1:]
        if C and "Z" in free and (not rest or len(free) >= 2):
            builder.attach(base, C[0], HINGE, "Z")
            builder.chain(C[0], C[1:])
            c_done = True
        else:
            c_done = not C
        if rest:
            builder.chain(base, rest)
        if not c_done:
            # base is full: X, Y go to A, B and Z to the rest of D
            builder.chain_avoiding(A[0], A[1:], keep_free="X")
            builder.attach(A[0], C[0], HINGE, "X")
            builder.chain(C[0], C[1:])
        elif A:
            builder.chain(A[0], A[1:])
        if B:
            builder.chain(B[0], B[1:])
        return builder.build(), generators

    if H.rank == 1:
        # phi is the all-ones vector: J acts by -1 on every copy
        builder = _TreeBuilder(n, 1)
        builder.chain(1, vertices[1:])
        return builder.build(), (J,)

    if C:
        base = C[0]
        builder = _TreeBuilder(n, base)
        if A:
            builder.attach(base, A[0], HINGE, "Y")
            builder.chain(A[0], A[1:])
        if B:
            builder.attach(base, B[0], HINGE, "X")
            builder.chain(B[0], B[1:])
        builder.chain(base, C[1:])
        return builder.build(), (J | F_X, J | F_Y)

    # C and D empty: a Z-hinge pair separating A from B
    base = A[0]
    builder = _TreeBuilder(n, base)
    builder.attach(base, B[0], HINGE, "Z")
    builder.chain(base, A[1:])
    builder.chain(B[0], B[1:])
    return builder.build(), (J, F_X)


@dataclass(frozen=True)
class CatalogEntry:
    """One permutation-equivalence class realized by a CP2-tree"""
    subspace: Subspace2           # canonical representative
    realized: Subspace2           # the group realized by `tree` as built
    tree: CP2Tree
    generators: Tuple[int, ...] = FULL_GENERATORS

    def to_dict(self) -> Dict:
        return {
            "class": self.subspace.describe(),
            "rows": self.subspace.rows(),
            "realized": self.realized.describe(),
            "tree": self.tree.to_dict(),
            "generators": [generator_name(g) for g in self.generators],
        }


def _characters_key(chars: Sequence[int], n: int) -> Optional[Tuple]:
    """Canonical key of the rank-3 subgroup whose columns are the characters"""
    rows = [sum(1 << (v) for v, c in enumerate(chars) if (c >> i) & 1) for i in range(3)]
    H = Subspace2.span(n, rows)
    if H.rank != 3:
        return None
    return canonical_key(H)


def _hub_tree(n: int, branches: Sequence[Tuple[str, int, str]], base_branch: Optional[str]) -> CP2Tree:
    """Hub vertex 1 with trivial-chain branches (point, size, kind)"""
    builder = _TreeBuilder(n, 1)
    next_vertex = 2
    firsts: Dict[str, int] = {}
    for point, size, kind in branches:
        first = next_vertex
        firsts[point] = first
        builder.attach(1, first, kind, point)
        builder.chain(first, list(range(first + 1, first + size)))
        next_vertex += size
    builder.base = 1 if base_branch is None else firsts[base_branch]
    return builder.build()


def _hub_configurations(n: int):
    """(branches, base_branch) for every hub-incident hinge configuration"""
    if n == 3:
        for pair in itertools.combinations(POINTS, 2):
            for kinds in itertools.product(KINDS, repeat=2):
                branches = [(p, 1, k) for p, k in zip(pair, kinds)]
                for base in (None,) + pair:
                    yield branches, base
        return
    for sx in range(1, n - 2):
        for sy in range(1, n - 1 - sx):
            sz = n - 1 - sx - sy
            if sz < 1:
                continue
            for kinds in itertools.product(KINDS, repeat=3):
                branches = list(zip(POINTS, (sx, sy, sz), kinds))
                for base in (None,) + POINTS:
                    yield branches, base


def _hub_characters(n: int, branches, base_branch) -> List[int]:
    rel = {p: (LAMBDA[p] if k == HINGE else 0) for p, _, k in branches}
    shift = 0 if base_branch is None else rel[base_branch]
    chars = [BASE_CHARACTER ^ shift]
    for p, size, _ in branches:
        chars += [BASE_CHARACTER ^ shift ^ rel[p]] * size
    return chars


def _any_scope_states(n: int):
    """
    Grow every tree from its base, merging states with equal
    (character, used points) multisets; returns representative trees
    """
    Start = ((BASE_CHARACTER, frozenset()),)
    level = {tuple(sorted(Start, key=_state_sort)): (list(Start), [])}
    for _ in range(1, n):
        nxt = {}
        for vertices, edges in level.values():
            for v, (chi, used) in enumerate(vertices):
                for point in POINTS:
                    if point in used:
                        continue
                    for kind in KINDS:
                        new_vertices = list(vertices)
                        new_vertices[v] = (chi, used | {point})
                        child_chi = chi ^ (LAMBDA[point] if kind == HINGE else 0)
                        new_vertices.append((child_chi, frozenset({point})))
                        key = tuple(sorted(new_vertices, key=_state_sort))
                        if key not in nxt:
                            nxt[key] = (new_vertices, edges + [(v + 1, len(vertices) + 1, kind, point)])
        level = nxt
    return level.values()


def _state_sort(item):
    chi, used = item
    return (chi, tuple(sorted(used)))


@lru_cache(maxsize=64)
@log_duration("rank3_catalog")
def rank3_catalog(n: int, max_vertices: int = None, hinge_scope: str = "hub") -> Dict[Tuple, CatalogEntry]:
    """
    Rank-3 subgroups of G_n realized by CP2-trees, up to permutation

    The hub scope only tries hinges incident to the hub, so its catalog is
    a lower bound on the realizable classes; "any" enumerates every tree
    up to max_vertices.

    Args:
        n: Number of CP2 copies
        max_vertices: Cap for the exhaustive 'any' scope (default 8)
        hinge_scope: 'hub' (hinges incident to the hub) or 'any'

    Returns:
        Mapping canonical key -> CatalogEntry
    """
    if hinge_scope not in ("hub", "any"):
        raise PreconditionError(f"Unknown hinge scope {hinge_scope}")
    catalog: Dict[Tuple, CatalogEntry] = {}
    if n < 3:
        return catalog

    if hinge_scope == "hub" or n == 3:
        seen: Set[Tuple[int, ...]] = set()
        for branches, base in _hub_configurations(n):
            chars = _hub_characters(n, branches, base)
            signature = tuple(sorted(chars))
            if signature in seen:
                continue
            seen.add(signature)
            key = _characters_key(chars, n)
            if key is None or key in catalog:
                continue
            tree = _hub_tree(n, branches, base)
            realized = realized_subgroup(tree)
            catalog[key] = CatalogEntry(canonical_form(realized), realized, tree)
    else:
        cap = max_vertices or DEFAULT_ANY_MAX_VERTICES
        if n > cap:
            raise PreconditionError(f"Exhaustive tree enumeration is capped at {cap} vertices")
        for vertices, edges in _any_scope_states(n):
            if not any(len(used) == 3 for _, used in vertices):
                continue
            chars = [chi for chi, _ in vertices]
            key = _characters_key(chars, n)
            if key is None or key in catalog:
                continue
            tree = CP2Tree(n, tuple(CP2Edge(p, c, k, pt, pt) for p, c, k, pt in edges), 1)
            realized = realized_subgroup(tree)
            catalog[key] = CatalogEntry(canonical_form(realized), realized, tree)

    logger.info(f"rank3_catalog(n={n}, scope={hinge_scope}): {len(catalog)} classes")
    return catalog
