"""Query alphabets with complementation, and bit-vector selections over them.

An alphabet holds ``2 * n_pairs + 2`` literals, indexed so that taking the
complement of a literal is a single XOR with 1: index 0 is the constant-false
query, index 1 its complement (constant true), and every user query occupies
an adjacent (even, odd) index pair.  Subsets of the alphabet -- selections,
observations, belief states, model-space vertices -- are plain Python
integers used as fixed-width bit vectors.
"""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

FALSE = 0
TRUE = 1


class Sigma:
    """An indexed alphabet of queries closed under complementation.

    Immutable; instances compare and hash by pair count and query names, so
    they can key caches.
    """

    __slots__ = ("n_pairs", "names", "n_literals", "full_mask", "_even_mask", "_name_index")

    def __init__(self, n_pairs: int, names: Iterable[str] | None = None):
        if n_pairs < 0:
            raise ValueError("n_pairs must be non-negative")
        if names is None:
            names = tuple(f"q{i}" for i in range(n_pairs))
        else:
            names = tuple(names)
        if len(names) != n_pairs:
            raise ValueError(f"expected {n_pairs} names, got {len(names)}")
        if len(set(names)) != n_pairs:
            raise ValueError("query names must be unique")
        object.__setattr__(self, "n_pairs", n_pairs)
        object.__setattr__(self, "names", names)
        n = 2 * n_pairs + 2
        object.__setattr__(self, "n_literals", n)
        object.__setattr__(self, "full_mask", (1 << n) - 1)
        even = 0
        for i in range(0, n, 2):
            even |= 1 << i
        object.__setattr__(self, "_even_mask", even)
        index = {"0": 0, "1": 1}
        for i, name in enumerate(names):
            index[name] = 2 * i + 2
            index[name + "*"] = 2 * i + 3
        object.__setattr__(self, "_name_index", index)

    def __setattr__(self, name, value):
        raise AttributeError("Sigma is immutable")

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __reduce__(self):
        return (Sigma, (self.n_pairs, self.names))

    def __eq__(self, other):
        return isinstance(other, Sigma) and self.n_pairs == other.n_pairs and self.names == other.names

    def __hash__(self):
        return hash((self.n_pairs, self.names))

    def __repr__(self):
        return f"Sigma(n_pairs={self.n_pairs})"

    # -- single literals ----------------------------------------------------

    def check_literal(self, x: int) -> int:
        if not 0 <= x < self.n_literals:
            raise IndexError(f"literal index {x} out of range for {self!r}")
        return x

    def complement(self, x: int) -> int:
        """The complementary query x*; an involution with no fixed points."""
        return self.check_literal(x) ^ 1

    def literal_name(self, x: int) -> str:
        self.check_literal(x)
        if x == FALSE:
            return "0"
        if x == TRUE:
            return "1"
        base = self.names[(x - 2) // 2]
        return base if x % 2 == 0 else base + "*"

    def literal_index(self, name: str) -> int:
        try:
            return self._name_index[name]
        except KeyError:
            raise KeyError(f"unknown literal name {name!r}") from None

    def pair_of(self, x: int) -> int:
        """Index of the complement pair holding x (pair 0 is {0, 1})."""
        return self.check_literal(x) // 2

    # -- literal sets as bit vectors ----------------------------------------

    def mask(self, *literals: int) -> int:
        """Bit vector holding the given literal indices."""
        bits = 0
        for x in literals:
            bits |= 1 << self.check_literal(x)
        return bits

    def mask_of_names(self, names: Iterable[str]) -> int:
        return self.mask(*(self.literal_index(n) for n in names))

    def literals(self, bits: int) -> list[int]:
        """Literal indices present in a bit vector, ascending."""
        out = []
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return out

    def star(self, bits: int) -> int:
        """The set of complements S* of a literal set S."""
        return (((bits & self._even_mask) << 1) | ((bits >> 1) & self._even_mask)) & self.full_mask

    def is_star_selection(self, bits: int) -> bool:
        """True iff the set never contains a literal together with its complement."""
        if bits & ~self.full_mask:
            raise ValueError("selection has bits outside the alphabet")
        return bits & self.star(bits) == 0

    def is_complete(self, bits: int) -> bool:
        """True iff the set picks exactly one literal of every pair and contains 1."""
        if bits & ~self.full_mask:
            raise ValueError("selection has bits outside the alphabet")
        return (bits ^ self.star(bits)) == self.full_mask and bool(bits & (1 << TRUE))

    def flip(self, v: int, s: int) -> int:
        """Exchange the literals of s (a subset of v) for their complements."""
        if s & ~v:
            raise ValueError("flip set must be a subset of the selection")
        return (v & ~s) | self.star(s)

    def hamming_distance(self, u: int, w: int) -> int:
        """|u \\ w| for complete selections u, w: the number of pairs they decide differently."""
        if not (self.is_complete(u) and self.is_complete(w)):
            raise ValueError("hamming_distance expects complete selections")
        return (u & ~w & self.full_mask).bit_count()

    # -- enumeration (oracle scale) ------------------------------------------

    def vertices(self) -> Iterator[int]:
        """All complete selections, in a fixed order.  2**n_pairs of them."""
        base = 1 << TRUE
        for combo in range(1 << self.n_pairs):
            v = base
            for i in range(self.n_pairs):
                v |= 1 << (2 * i + 2 + ((combo >> i) & 1))
            yield v

    def random_vertex(self, rng: np.random.Generator) -> int:
        v = 1 << TRUE
        for i in range(self.n_pairs):
            v |= 1 << (2 * i + 2 + int(rng.integers(0, 2)))
        return v

    def format_set(self, bits: int) -> str:
        return "{" + ", ".join(self.literal_name(x) for x in self.literals(bits)) + "}"


# -- numpy bridge ------------------------------------------------------------

from functools import lru_cache


@lru_cache(maxsize=None)
def star_permutation(sigma: Sigma) -> np.ndarray:
    """Index array sending each literal to its complement."""
    perm = np.arange(sigma.n_literals) ^ 1
    perm.flags.writeable = False
    return perm


@lru_cache(maxsize=None)
def disjoint_pairs_matrix(sigma: Sigma) -> np.ndarray:
    """Boolean matrix: True where two literals come from different pairs."""
    pair = np.arange(sigma.n_literals) // 2
    out = pair[:, None] != pair[None, :]
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def proper_pairs_matrix(sigma: Sigma) -> np.ndarray:
    """Disjoint-pairs matrix restricted to proper literals (neither 0 nor 1).

    This is the domain over which learned implications are counted and
    compared.
    """
    proper = np.arange(sigma.n_literals) >= 2
    out = disjoint_pairs_matrix(sigma) & proper[:, None] & proper[None, :]
    out.flags.writeable = False
    return out


def bool_from_mask(mask: int, n_literals: int) -> np.ndarray:
    """Bit vector -> boolean numpy vector of length n_literals."""
    raw = mask.to_bytes((n_literals + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n_literals].astype(bool)


def mask_from_bool(vec: np.ndarray) -> int:
    """Boolean numpy vector -> bit vector."""
    raw = np.packbits(vec.astype(bool), bitorder="little").tobytes()
    return int.from_bytes(raw, "little")
