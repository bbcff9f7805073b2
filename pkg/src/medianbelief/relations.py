"""Implication records over a query alphabet.

A ``Pcr`` stores a set of default implications ``a -> b`` between literals,
kept closed under contraposition (recording ``a -> b`` records ``b* -> a*``)
and always containing ``0 -> a`` and ``a -> 1`` for every literal.  Reasoning
reads the reflexive-transitive closure of the record: ``leq(a, b)`` asks
whether ``b`` follows from ``a`` by chaining recorded implications.

Queries that imply their own complement are negligible; a record is
degenerate when some query and its complement are both negligible, in which
case it admits no complete coherent selection and most geometric operations
refuse it.  ``canonical_quotient`` collapses equivalent queries and the
negligible ones into a reduced record whose order is antisymmetric -- the
canonical reduced form sharing the same model space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .alphabet import FALSE, TRUE, Sigma, bool_from_mask


class DegenerateRecordError(ValueError):
    """Raised when an operation requires a non-degenerate implication record."""


def dfs_reach(succ: Sequence[int], seeds: int) -> int:
    """Forward closure of a literal set under successor bit masks.

    Iterative depth-first search; returns the union of the seeds with every
    literal reachable from them.
    """
    visited = 0
    stack = []
    m = seeds
    while m:
        low = m & -m
        m ^= low
        stack.append(low.bit_length() - 1)
    while stack:
        a = stack.pop()
        bit = 1 << a
        if visited & bit:
            continue
        visited |= bit
        fresh = succ[a] & ~visited
        while fresh:
            low = fresh & -fresh
            fresh ^= low
            stack.append(low.bit_length() - 1)
    return visited | seeds


class Pcr:
    """A record of default implications, closed under contraposition.

    Single-writer while being built with ``insert``; once the closure has been
    computed (any query forces it) the instance is safe to share for reading.
    """

    def __init__(self, sigma: Sigma, pairs: Iterable[tuple[int, int]] = ()):
        self.sigma = sigma
        n = sigma.n_literals
        full = sigma.full_mask
        succ = [0] * n
        succ[FALSE] = full
        one = 1 << TRUE
        for a in range(n):
            succ[a] |= one
        self._succ = succ
        self._gen: set[tuple[int, int]] = set()
        self._reach: list[int] | None = None
        self._rep_mask: int | None = None
        self._quotient: "PocQuotient | None" = None
        for a, b in pairs:
            self.insert(a, b)

    # -- construction ---------------------------------------------------------

    @classmethod
    def orthogonal(cls, sigma: Sigma) -> "Pcr":
        """The smallest record: only the forced implications 0 -> a and a -> 1."""
        return cls(sigma)

    @classmethod
    def from_bool_matrix(cls, sigma: Sigma, mat: np.ndarray) -> "Pcr":
        """Bulk construction from a boolean adjacency matrix mat[a, b] = (a -> b)."""
        n = sigma.n_literals
        if mat.shape != (n, n):
            raise ValueError("matrix shape does not match the alphabet")
        perm = np.arange(n) ^ 1
        closed = mat | mat[np.ix_(perm, perm)].T
        pcr = cls(sigma)
        succ = pcr._succ
        base = [succ[a] for a in range(n)]
        for a in range(n):
            row = int.from_bytes(np.packbits(closed[a], bitorder="little").tobytes(), "little")
            succ[a] |= row
        for a in range(n):
            extra = succ[a] & ~base[a]
            while extra:
                low = extra & -extra
                extra ^= low
                pcr._gen.add((a, low.bit_length() - 1))
        return pcr

    def copy(self) -> "Pcr":
        dup = Pcr(self.sigma)
        dup._succ = list(self._succ)
        dup._gen = set(self._gen)
        dup._reach = list(self._reach) if self._reach is not None else None
        dup._rep_mask = self._rep_mask
        dup._quotient = self._quotient
        return dup

    def insert(self, a: int, b: int) -> "Pcr":
        """Record a -> b (and the contrapositive b* -> a*); invalidates the closure."""
        self.sigma.check_literal(a)
        self.sigma.check_literal(b)
        bit_b = 1 << b
        if self._succ[a] & bit_b:
            return self
        self._succ[a] |= bit_b
        self._succ[b ^ 1] |= 1 << (a ^ 1)
        self._gen.add((a, b))
        self._reach = None
        self._rep_mask = None
        self._quotient = None
        return self

    # -- raw record access ------------------------------------------------------

    def contains(self, a: int, b: int) -> bool:
        """Whether a -> b is recorded directly (not through chaining)."""
        return bool(self._succ[a] & (1 << b))

    def generating_pairs(self) -> Iterator[tuple[int, int]]:
        """The inserted implications, excluding the forced 0/1 base."""
        return iter(sorted(self._gen))

    @property
    def succ_masks(self) -> Sequence[int]:
        return self._succ

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self._succ)

    def relation_matrix(self) -> np.ndarray:
        n = self.sigma.n_literals
        out = np.zeros((n, n), dtype=bool)
        for a in range(n):
            out[a] = bool_from_mask(self._succ[a], n)
        return out

    # -- closure --------------------------------------------------------------

    def _ensure_closure(self) -> list[int]:
        if self._reach is None:
            succ = self._succ
            n = self.sigma.n_literals
            reach = [succ[a] | (1 << a) for a in range(n)]
            changed = True
            while changed:
                changed = False
                for a in range(n):
                    r = reach[a]
                    acc = r
                    m = r
                    while m:
                        low = m & -m
                        m ^= low
                        acc |= reach[low.bit_length() - 1]
                    if acc != r:
                        reach[a] = acc
                        changed = True
            self._reach = reach
        return self._reach

    def leq(self, a: int, b: int) -> bool:
        """Whether a <= b in the reflexive-transitive closure of the record."""
        self.sigma.check_literal(a)
        self.sigma.check_literal(b)
        if a == b:
            return True
        if self._reach is not None:
            return bool(self._reach[a] & (1 << b))
        return bool(dfs_reach(self._succ, 1 << a) & (1 << b))

    def up(self, bits: int) -> int:
        """Forward closure: every literal implied by some member of the set."""
        if self._reach is not None:
            out = bits
            m = bits
            while m:
                low = m & -m
                m ^= low
                out |= self._reach[low.bit_length() - 1]
            return out
        return dfs_reach(self._succ, bits)

    def down(self, bits: int) -> int:
        """Backward closure: every literal implying some member of the set."""
        return self.sigma.star(self.up(self.sigma.star(bits)))

    def is_coherent(self, bits: int) -> bool:
        """True iff no member of the set implies the complement of a member."""
        return self.up(bits) & self.sigma.star(bits) == 0

    def negligibles(self) -> int:
        """Literals implying their own complement; always contains 0."""
        reach = self._ensure_closure()
        out = 0
        for a in range(self.sigma.n_literals):
            if reach[a] & (1 << (a ^ 1)):
                out |= 1 << a
        return out

    def is_degenerate(self) -> bool:
        """True iff some query and its complement are both negligible."""
        neg = self.negligibles()
        return neg & self.sigma.star(neg) != 0

    def equivalence_class(self, a: int) -> int:
        """Literals equivalent to a: those both implied by and implying it."""
        reach = self._ensure_closure()
        return reach[a] & self.sigma.star(reach[a ^ 1])

    # -- quotient metric --------------------------------------------------------

    def metric_rep_mask(self) -> int:
        """One representative literal per proper equivalence-class pair.

        XOR of two complete coherent selections masked by this gives the number
        of class pairs they decide differently, which is the model-space metric.
        """
        if self._rep_mask is None:
            if self.is_degenerate():
                raise DegenerateRecordError("degenerate record has no model-space metric")
            sigma = self.sigma
            neg = self.negligibles()
            skip = neg | sigma.star(neg)
            mask = 0
            seen = 0
            for a in range(2, sigma.n_literals):
                if (seen | skip) & (1 << a):
                    continue
                cls = self.equivalence_class(a)
                mask |= 1 << a
                seen |= cls | sigma.star(cls)
            self._rep_mask = mask
        return self._rep_mask

    def distance(self, u: int, w: int) -> int:
        """Model-space metric between complete coherent selections."""
        return ((u ^ w) & self.metric_rep_mask()).bit_count()

    def quotient_set_distance(self, u: int, w: int) -> int:
        """|classes(u) - classes(w)| for arbitrary literal sets u, w."""
        quo = self.canonical_quotient()
        return len(set(quo.project_literals(u)) - set(quo.project_literals(w)))

    # -- canonical quotient -------------------------------------------------------

    def canonical_quotient(self) -> "PocQuotient":
        """Collapse equivalent queries and merge negligible ones into 0.

        The result's record is transitive and antisymmetric with 0 the only
        negligible element, and its model space is in bijection with this
        record's model space.
        """
        if self._quotient is not None:
            return self._quotient
        if self.is_degenerate():
            raise DegenerateRecordError("cannot form the canonical quotient of a degenerate record")
        sigma = self.sigma
        reach = self._ensure_closure()
        neg = self.negligibles()
        neg_star = sigma.star(neg)
        n = sigma.n_literals

        proj: list[int | None] = [None] * n
        classes: list[int] = [neg, neg_star]
        for a in sigma.literals(neg):
            proj[a] = 0
        for a in sigma.literals(neg_star):
            proj[a] = 1
        reps: list[int] = [FALSE, TRUE]
        q_names: list[str] = []
        for a in range(2, n):
            if proj[a] is not None:
                continue
            cls = self.equivalence_class(a)
            pos = cls if a % 2 == 0 else sigma.star(cls)
            low = sigma.literals(pos | sigma.star(pos))[0]
            if not (pos >> low) & 1:
                pos = sigma.star(pos)
            idx = len(classes)
            classes.append(pos)
            classes.append(sigma.star(pos))
            for b in sigma.literals(pos):
                proj[b] = idx
            for b in sigma.literals(sigma.star(pos)):
                proj[b] = idx + 1
            reps.append(low)
            reps.append(low ^ 1)
            q_names.append(sigma.literal_name(low))

        q_sigma = Sigma(len(q_names), q_names)
        q_n = q_sigma.n_literals
        mat = np.zeros((q_n, q_n), dtype=bool)
        for qa in range(q_n):
            row = reach[reps[qa]]
            for qb in range(q_n):
                mat[qa, qb] = bool(row & (1 << reps[qb]))
        quotient = Pcr.from_bool_matrix(q_sigma, mat)
        out = PocQuotient(pcr=quotient, classes=tuple(classes), projection=tuple(proj))  # type: ignore[arg-type]
        self._quotient = out
        return out

    # -- combination -----------------------------------------------------------

    def direct_sum(self, other: "Pcr") -> "Pcr":
        """Join two records over a merged alphabet, sharing only 0 and 1.

        No implications run between the summands, so the combined model space
        is the product of the two model spaces.
        """
        if self.is_degenerate() or other.is_degenerate():
            raise DegenerateRecordError("direct sum requires non-degenerate summands")
        left = self.sigma
        right = other.sigma
        names = list(left.names)
        taken = set(names)
        right_names = []
        for name in right.names:
            fresh = name
            while fresh in taken:
                fresh += "'"
            taken.add(fresh)
            right_names.append(fresh)
        sigma = Sigma(left.n_pairs + right.n_pairs, names + right_names)
        shift = 2 * left.n_pairs

        def map_left(x: int) -> int:
            return x

        def map_right(x: int) -> int:
            return x if x < 2 else x + shift

        out = Pcr(sigma)
        for a, b in self._gen:
            out.insert(map_left(a), map_left(b))
        for a, b in other._gen:
            out.insert(map_right(a), map_right(b))
        return out

    # -- reporting ---------------------------------------------------------------

    def dump(self) -> str:
        """Textual record: one generating implication per line, then structure comments."""
        sigma = self.sigma
        lines = [
            f"{sigma.literal_name(a)} -> {sigma.literal_name(b)}"
            for a, b in self.generating_pairs()
        ]
        neg = self.negligibles()
        lines.append(f"# negligible: {sigma.format_set(neg)}")
        if not self.is_degenerate():
            quo = self.canonical_quotient()
            parts = " ".join(sigma.format_set(cls) for cls in quo.classes)
            lines.append(f"# classes: {parts}")
        else:
            lines.append("# classes: (degenerate record)")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"Pcr(n_pairs={self.sigma.n_pairs}, generators={len(self._gen)})"


@dataclass(frozen=True)
class PocQuotient:
    """The canonical reduced record together with its class structure.

    ``classes[q]`` is the literal set collapsed into quotient literal ``q``;
    ``projection[x]`` is the quotient literal of source literal ``x``.
    """

    pcr: Pcr
    classes: tuple[int, ...]
    projection: tuple[int, ...]

    def project_literals(self, bits: int) -> list[int]:
        return sorted({self.projection[x] for x in _literals_of(bits)})

    def project_set(self, bits: int) -> int:
        out = 0
        for x in _literals_of(bits):
            out |= 1 << self.projection[x]
        return out

    def lift_vertex(self, qbits: int) -> int:
        """Union of the classes selected by a quotient-model vertex."""
        out = 0
        for q in _literals_of(qbits):
            out |= self.classes[q]
        return out


def _literals_of(bits: int) -> Iterator[int]:
    while bits:
        low = bits & -bits
        bits ^= low
        yield low.bit_length() - 1
