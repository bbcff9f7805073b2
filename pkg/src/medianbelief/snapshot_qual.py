"""Qualitative snapshots: pairwise rank tables learned from ranked observations.

A qualitative snapshot keeps, for every pair of literals, the best (lowest)
rank ever observed on a world containing both.  Entries live in the extended
naturals, with ``numpy.inf`` standing for "never witnessed".  Updates take
the entrywise minimum with the table of the incoming point-mass observation,
so the table only ever improves and converges for a fixed signal.

From the table one extracts a non-degenerate implication record (``a -> b``
whenever witnessing ``a`` without ``b`` is sufficiently more irrelevant than
the alternatives) and the minset: the literals strictly preferred to their
complements, whose vertex set is the learned target region.
"""

from __future__ import annotations

import numpy as np

from .alphabet import (
    Sigma,
    bool_from_mask,
    disjoint_pairs_matrix,
    star_permutation,
)
from .relations import Pcr

INF = np.inf


class UninitializedSnapshotError(RuntimeError):
    """Raised when a derivation needs at least one observation."""


class InvalidSnapshotError(ValueError):
    """Raised when a weight table fails the rank-table conditions."""


# -- rank-table validity -------------------------------------------------------


def rank_table_violations(sigma: Sigma, w: np.ndarray) -> list[str]:
    """Check the four structural conditions of a pairwise rank table.

    Returns human-readable violation descriptions; empty means valid.
    """
    n = sigma.n_literals
    perm = star_permutation(sigma)
    out = []
    if w.shape != (n, n):
        return [f"shape {w.shape} does not match alphabet of {n} literals"]
    if not np.array_equal(w, w.T):
        out.append("table is not symmetric")
    if not np.all(w[0, :] == INF):
        out.append("entries pairing with the false query must be infinite")
    if not np.all(w[np.arange(n), perm] == INF):
        out.append("entries pairing a literal with its complement must be infinite")
    diag = w.diagonal()
    level = np.minimum(diag, diag[perm])
    if not np.isfinite(level[0]) or not np.all(level == level[0]):
        out.append("minimum rank over each pair must be constant and finite")
    expect = np.minimum(w, w[:, perm])
    if not np.array_equal(expect, np.broadcast_to(diag[:, None], (n, n))):
        out.append("diagonal must equal the row minimum over each complement pair")
    ws = w[:, perm]
    reachable = np.minimum(ws[:, :, None], ws[None, :, :]).max(axis=1)
    if np.any(ws < reachable):
        out.append("triangle condition violated")
    return out


def is_rank_table(sigma: Sigma, w: np.ndarray) -> bool:
    return not rank_table_violations(sigma, w)


# -- derivation (matrix fast path, shared with the simulators) -------------------


def derived_matrix(sigma: Sigma, w: np.ndarray, delta: float) -> np.ndarray:
    """Boolean implication matrix extracted from a rank table."""
    perm = star_permutation(sigma)
    domain = disjoint_pairs_matrix(sigma)
    wstar = w[:, perm]
    if np.isinf(delta):
        wss = w[np.ix_(perm, perm)]
        rel = (wstar == INF) & (w < INF) & (wss < INF)
    else:
        wss = w[np.ix_(perm, perm)]
        rel = (wstar == INF) | (wstar > delta + np.maximum(w, wss))
    return rel & domain


def residual_matrix(sigma: Sigma, w: np.ndarray, delta: float) -> np.ndarray:
    """Boolean implication matrix of the residual record at tolerance delta."""
    perm = star_permutation(sigma)
    domain = disjoint_pairs_matrix(sigma)
    wstar = w[:, perm]
    if np.isinf(delta):
        rel = wstar == INF
    else:
        rel = wstar > delta
    return rel & domain


def point_mass_table(sigma: Sigma, u: int, rank: float) -> np.ndarray:
    """Rank table of a single observation: rank where both literals hold, else inf."""
    members = bool_from_mask(u, sigma.n_literals)
    w = np.full((sigma.n_literals, sigma.n_literals), INF)
    w[np.ix_(members, members)] = float(rank)
    return w


class QualSnapshot:
    """Mutable learner state for a ranked (qualitative) value signal.

    Single-writer; starts uninitialized, and the first update installs the
    observation's own rank table verbatim.
    """

    def __init__(self, sigma: Sigma, delta: float = 0.0):
        if delta < 0:
            raise ValueError("delta must be non-negative")
        self.sigma = sigma
        self.delta = float(delta)
        self.w: np.ndarray | None = None

    @property
    def initialized(self) -> bool:
        return self.w is not None

    def update(self, observation: int, value: float) -> bool:
        """Fold in one observed world with its rank.  Returns True if anything changed."""
        if not self.sigma.is_complete(observation):
            raise ValueError("observation must be a complete selection")
        value = float(value)
        if not np.isfinite(value) or value < 0:
            raise ValueError("observation rank must be finite and non-negative")
        members = np.flatnonzero(bool_from_mask(observation, self.sigma.n_literals))
        if self.w is None:
            self.w = point_mass_table(self.sigma, observation, value)
            return True
        sub = self.w[np.ix_(members, members)]
        if not (sub > value).any():
            return False
        np.minimum(sub, value, out=sub)
        self.w[np.ix_(members, members)] = sub
        return True

    def _table(self) -> np.ndarray:
        if self.w is None:
            raise UninitializedSnapshotError("snapshot has no observations yet")
        return self.w

    def w_min(self) -> float:
        """The best rank seen so far (the table's global minimum)."""
        return float(self._table().diagonal().min())

    def validate(self) -> list[str]:
        return rank_table_violations(self.sigma, self._table())

    def residual_pcr(self, delta: float | None = None) -> Pcr:
        """Record of everything not yet contradicted above tolerance delta."""
        w = self._table()
        if delta is None:
            delta = self.delta
        if not np.isinf(delta) and delta < self.w_min():
            raise ValueError("finite tolerance must be at least the table minimum")
        return Pcr.from_bool_matrix(self.sigma, residual_matrix(self.sigma, w, delta))

    def derived_pcr(self, delta: float | None = None) -> Pcr:
        """The learned implication record; non-degenerate by construction."""
        w = self._table()
        if delta is None:
            delta = self.delta
        return Pcr.from_bool_matrix(self.sigma, derived_matrix(self.sigma, w, delta))

    def minset(self, epsilon: float = 0.0) -> int:
        """Literals ranked strictly better than their complements by more than epsilon."""
        if self.w is None:
            return 0
        perm = star_permutation(self.sigma)
        diag = self.w.diagonal()
        keep = diag < diag[perm] - epsilon
        out = 0
        for x in np.flatnonzero(keep):
            out |= 1 << int(x)
        return out

    def copy(self) -> "QualSnapshot":
        dup = QualSnapshot(self.sigma, self.delta)
        dup.w = None if self.w is None else self.w.copy()
        return dup


# -- rankings (oracle scale) ------------------------------------------------------


class Ranking:
    """A rank assignment on the full world cube; set rank is the member minimum.

    Worlds absent from ``values`` rank infinite.  Only for small alphabets:
    the snapshot machinery above never materializes one of these.
    """

    def __init__(self, sigma: Sigma, values: dict[int, float]):
        self.sigma = sigma
        self.values = {u: float(r) for u, r in values.items() if r != INF}
        if not any(np.isfinite(r) for r in self.values.values()):
            raise ValueError("a ranking must be finite somewhere")

    @classmethod
    def point_mass(cls, sigma: Sigma, u: int, rank: float) -> "Ranking":
        if not sigma.is_complete(u):
            raise ValueError("point mass must sit on a complete selection")
        if not np.isfinite(rank):
            raise ValueError("point-mass rank must be finite")
        return cls(sigma, {u: rank})

    @classmethod
    def minimum(cls, first: "Ranking", second: "Ranking") -> "Ranking":
        values = dict(first.values)
        for u, r in second.values.items():
            values[u] = min(values.get(u, INF), r)
        return cls(first.sigma, values)

    def rank(self, worlds) -> float:
        """Rank of a set of worlds (or a single world): the minimum over members."""
        if isinstance(worlds, int):
            worlds = (worlds,)
        best = INF
        for u in worlds:
            best = min(best, self.values.get(u, INF))
        return best

    def rank_of_base(self, bits: int) -> float:
        """Minimum rank over the worlds containing every literal of the set."""
        best = INF
        for u, r in self.values.items():
            if bits & ~u == 0:
                best = min(best, r)
        return best

    def min_value(self) -> float:
        return min(self.values.values())

    def global_minima(self) -> list[int]:
        best = self.min_value()
        return sorted(u for u, r in self.values.items() if r == best)

    def two_restriction(self, delta: float = 0.0) -> QualSnapshot:
        """The pairwise rank table of this ranking."""
        snap = QualSnapshot(self.sigma, delta)
        n = self.sigma.n_literals
        w = np.full((n, n), INF)
        for u, r in self.values.items():
            members = bool_from_mask(u, n)
            block = w[np.ix_(members, members)]
            np.minimum(block, r, out=block)
            w[np.ix_(members, members)] = block
        snap.w = w
        return snap


def completion(snapshot: QualSnapshot) -> Ranking:
    """The unique minimal ranking agreeing with a valid rank table.

    Each world ranks at the worst entry among the pairs it contains; this is
    the smallest ranking whose pairwise table reproduces the snapshot.
    """
    w = snapshot._table()
    problems = rank_table_violations(snapshot.sigma, w)
    if problems:
        raise InvalidSnapshotError("; ".join(problems))
    sigma = snapshot.sigma
    n = sigma.n_literals
    values = {}
    for u in sigma.vertices():
        members = bool_from_mask(u, n)
        values[u] = float(w[np.ix_(members, members)].max())
    return Ranking(sigma, values)
