"""The dual model space of an implication record, at verification scale.

Vertices of the model space are the complete coherent selections on the
alphabet: the possible worlds admitted by the record.  Two vertices are
adjacent when they decide exactly one equivalence-class pair differently,
which makes the space a median graph.  Everything here enumerates vertices
explicitly and is intended for small alphabets (oracle and test work); the
production reasoning path lives in ``propagation`` and never enumerates.
"""

from __future__ import annotations

from functools import reduce

from .alphabet import TRUE
from .relations import DegenerateRecordError, Pcr

ENUMERATION_CAP = 14


class EnumerationCapError(ValueError):
    """Raised when a dual-space enumeration is requested above oracle scale."""


class DualSpace:
    """Explicitly enumerated model space of a frozen non-degenerate record."""

    def __init__(self, pcr: Pcr, vertices: list[int]):
        self.pcr = pcr
        self.vertices = vertices
        self.index = {v: i for i, v in enumerate(vertices)}
        self._rep_mask = pcr.metric_rep_mask()
        sigma = pcr.sigma
        flips = []
        mask = self._rep_mask
        while mask:
            low = mask & -mask
            mask ^= low
            rep = low.bit_length() - 1
            cls = pcr.equivalence_class(rep)
            flips.append(cls | sigma.star(cls))
        self._flip_masks = flips
        self._adj: list[list[int]] | None = None

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, u: int) -> bool:
        return u in self.index

    def distance(self, u: int, w: int) -> int:
        return ((u ^ w) & self._rep_mask).bit_count()

    def neighbors(self, u: int) -> list[int]:
        out = []
        for flip in self._flip_masks:
            w = u ^ flip
            if w in self.index:
                out.append(w)
        return out

    def adjacency(self) -> list[list[int]]:
        """Neighbor lists by vertex index."""
        if self._adj is None:
            self._adj = [
                [self.index[w] for w in self.neighbors(u)] for u in self.vertices
            ]
        return self._adj

    def edges(self) -> list[tuple[int, int]]:
        adj = self.adjacency()
        return [(i, j) for i, nbrs in enumerate(adj) for j in nbrs if i < j]

    def bfs_distances(self, u: int) -> list[int]:
        """Hop distance from u to every vertex, by index; -1 if unreachable."""
        adj = self.adjacency()
        dist = [-1] * len(self.vertices)
        start = self.index[u]
        dist[start] = 0
        frontier = [start]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for i in frontier:
                for j in adj[i]:
                    if dist[j] < 0:
                        dist[j] = d
                        nxt.append(j)
            frontier = nxt
        return dist


def enumerate_dual(pcr: Pcr, cap: int = ENUMERATION_CAP) -> DualSpace:
    """All complete coherent selections of a non-degenerate record.

    Depth-first assignment over complement pairs, pruning any branch whose
    partial selection already implies the complement of a chosen literal.
    """
    sigma = pcr.sigma
    if sigma.n_pairs > cap:
        raise EnumerationCapError(
            f"dual enumeration capped at {cap} pairs (got {sigma.n_pairs}); oracle-scale only"
        )
    if pcr.is_degenerate():
        raise DegenerateRecordError("degenerate record has an empty or incomplete model space")
    reach = pcr._ensure_closure()
    star = sigma.star
    n_pairs = sigma.n_pairs
    vertices: list[int] = []
    root = 1 << TRUE
    root_up = reach[TRUE]
    if root_up & star(root):
        return DualSpace(pcr, [])

    stack = [(0, root, root_up)]
    while stack:
        pair, chosen, up = stack.pop()
        if pair == n_pairs:
            vertices.append(chosen)
            continue
        for x in (2 * pair + 3, 2 * pair + 2):
            new_chosen = chosen | (1 << x)
            new_up = up | reach[x]
            if new_up & star(new_chosen):
                continue
            stack.append((pair + 1, new_chosen, new_up))
    vertices.sort()
    return DualSpace(pcr, vertices)


def halfspace(dual: DualSpace, bits: int) -> list[int]:
    """Vertices containing every literal of the given set."""
    return [u for u in dual.vertices if bits & ~u == 0]


def median(u: int, v: int, w: int) -> int:
    """The majority selection of three vertices."""
    return (u & v) | (u & w) | (v & w)


def interval(dual: DualSpace, u: int, v: int) -> list[int]:
    """Vertices lying on some shortest path between u and v."""
    core = u & v
    return [w for w in dual.vertices if core & ~w == 0]


def sharp(dual: DualSpace, vertices: list[int]) -> int:
    """The literals shared by every vertex of a non-empty set."""
    if not vertices:
        raise ValueError("sharp of an empty vertex set is undefined")
    return reduce(lambda a, b: a & b, vertices)


def convex_hull(dual: DualSpace, vertices: list[int]) -> list[int]:
    """Smallest convex vertex set containing the input."""
    return halfspace(dual, sharp(dual, vertices))


def _require_closed_coherent(pcr: Pcr, bits: int, label: str) -> None:
    if not pcr.is_coherent(bits):
        raise ValueError(f"{label} must be coherent")
    if pcr.up(bits) != bits:
        raise ValueError(f"{label} must be forward-closed")


def divergence(pcr: Pcr, source: int, target: int) -> int:
    """|target \\ source| for forward-closed coherent sets.

    Bounds the distance from any vertex over ``source`` to the vertex set over
    ``target``.
    """
    _require_closed_coherent(pcr, source, "source")
    _require_closed_coherent(pcr, target, "target")
    return (target & ~source).bit_count()


def separator(dual: DualSpace, left: list[int], right: list[int]) -> int:
    """Literals true on all of ``left`` and false on all of ``right``."""
    if not left or not right:
        raise ValueError("separator needs non-empty vertex sets")
    return sharp(dual, left) & dual.pcr.sigma.star(sharp(dual, right))


def _minimal_below(pcr: Pcr, u: int, c: int) -> int:
    """Descend from c inside u to a literal of u minimal in the induced order."""
    sigma = pcr.sigma
    while True:
        below = sigma.star(pcr.up(1 << (c ^ 1))) & u
        strictly = below & ~pcr.equivalence_class(c)
        if not strictly:
            return c
        c = (strictly & -strictly).bit_length() - 1


def geodesic_to(dual: DualSpace, u: int, target: int) -> list[int]:
    """A shortest vertex path from u into the vertices over a coherent set.

    Each step flips one minimal equivalence class lying below the complement
    of a missing target literal.
    """
    pcr = dual.pcr
    sigma = pcr.sigma
    if not pcr.is_coherent(target):
        raise ValueError("target set must be coherent")
    path = [u]
    current = u
    while True:
        missing = target & ~current
        if not missing:
            return path
        b = sigma.literals(missing)[0]
        c = _minimal_below(pcr, current, b ^ 1)
        cls = pcr.equivalence_class(c)
        current = (current & ~cls) | sigma.star(cls)
        path.append(current)
        if len(path) > len(dual.vertices) + 1:
            raise RuntimeError("geodesic construction failed to terminate; broken model space")


def project_point(pcr: Pcr, u: int, target: int) -> int:
    """Nearest vertex over a coherent target set, computed set-theoretically."""
    if not pcr.is_coherent(target):
        raise ValueError("target set must be coherent")
    if not pcr.sigma.is_complete(u):
        raise ValueError("point must be a complete selection")
    up_t = pcr.up(target)
    return (u & ~pcr.sigma.star(up_t)) | up_t


def project_convex(pcr: Pcr, source: int, target: int) -> int:
    """Base of the pointwise projection of one convex set onto another.

    ``source`` must be coherent; ``target`` may be arbitrary (the projection
    target is the vertex set over its coherent repair).  The repair happens
    before anything is subtracted, so source literals caught in the target's
    self-contradictory zone survive, as the nearest-point map demands.
    """
    if not pcr.is_coherent(source):
        raise ValueError("source set must be coherent")
    star = pcr.sigma.star
    up_t = pcr.up(target)
    repaired = up_t & ~star(up_t)
    return (pcr.up(source) | repaired) & ~star(repaired)


class Halfspace:
    """A convex vertex set presented by its forward-closed coherent base.

    Bases are stored forward-closed, so two presentations of the same convex
    set compare equal.
    """

    __slots__ = ("pcr", "base")

    def __init__(self, pcr: Pcr, base: int):
        self.pcr = pcr
        self.base = pcr.up(base)

    def contains(self, u: int) -> bool:
        return self.base & ~u == 0

    def vertices(self, dual: DualSpace) -> list[int]:
        return halfspace(dual, self.base)

    def __eq__(self, other):
        return isinstance(other, Halfspace) and self.pcr is other.pcr and self.base == other.base

    def __hash__(self):
        return hash((id(self.pcr), self.base))

    def __repr__(self):
        return f"Halfspace({self.pcr.sigma.format_set(self.base)})"
