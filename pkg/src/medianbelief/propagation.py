"""The production reasoning kernel: signal propagation over an implication record.

Propagating a signal T over a record loaded with a coherent set S spreads
excitation forward along recorded implications and inhibits the complement of
everything the signal forces: the result is ``up(S | T) - star(up(T))``.
Geometrically this is the base of the nearest-point projection of the convex
set over S onto the convex set over the coherent repair of T -- computed in
O(edges) time with no enumeration of the model space.

Propagating into an empty load yields the coherent repair ("projection") of
the signal itself, which is how a raw observation becomes a belief state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .relations import Pcr


class IncoherentLoadError(ValueError):
    """Raised when the load handed to propagate is not coherent."""


def _dfs_closure(succ: Sequence[int], seeds: int, stats: dict | None) -> int:
    """Forward closure by explicit-stack depth-first search.

    Counts successor-edge touches into ``stats["edges"]`` when given; each
    node is expanded at most once per call.
    """
    visited = 0
    stack = []
    m = seeds
    while m:
        low = m & -m
        m ^= low
        stack.append(low.bit_length() - 1)
    touched = 0
    while stack:
        a = stack.pop()
        bit = 1 << a
        if visited & bit:
            continue
        visited |= bit
        row = succ[a]
        touched += row.bit_count()
        fresh = row & ~visited
        while fresh:
            low = fresh & -fresh
            fresh ^= low
            stack.append(low.bit_length() - 1)
    if stats is not None:
        stats["edges"] = stats.get("edges", 0) + touched
    return visited


def propagate_masks(
    succ: Sequence[int],
    star,
    load: int,
    signal: int,
    stats: dict | None = None,
) -> int:
    """Mask-level propagation for callers that manage their own adjacency.

    The signal is coherently repaired before it inhibits anything, so load
    literals caught in the signal's self-contradictory zone survive; this is
    what makes the result the exact nearest-point projection base.
    """
    up_load = _dfs_closure(succ, load, stats)
    if up_load & star(load):
        raise IncoherentLoadError("propagation load must be coherent")
    up_signal = _dfs_closure(succ, signal, stats)
    repaired = up_signal & ~star(up_signal)
    return (up_load | repaired) & ~star(repaired)


def coherent_projection_masks(succ: Sequence[int], star, signal: int, stats: dict | None = None) -> int:
    up_signal = _dfs_closure(succ, signal, stats)
    return up_signal & ~star(up_signal)


def propagate(pcr: Pcr, load: int, signal: int, stats: dict | None = None) -> int:
    """(up(load) | repair(signal)) - star(repair(signal)), for a coherent load.

    The result is forward-closed and coherent; its vertex set is exactly the
    pointwise nearest-vertex projection of the load's vertex set onto the
    vertex set over the signal's coherent repair.
    """
    return propagate_masks(pcr.succ_masks, pcr.sigma.star, load, signal, stats)


def coherent_projection(pcr: Pcr, signal: int, stats: dict | None = None) -> int:
    """The canonical repair of an arbitrary (possibly contradictory) literal set.

    Forward-closes the set, then drops everything whose complement was also
    forced.  Idempotent; fixed points are exactly the forward-closed coherent
    sets.
    """
    return coherent_projection_masks(pcr.succ_masks, pcr.sigma.star, signal, stats)


def belief_update(pcr: Pcr, observation: int) -> int:
    """Belief state from a complete raw observation: its coherent repair.

    Every model-space vertex nearest to the raw observation contains the
    result, so the belief state names exactly what the observation forces.
    """
    if not pcr.sigma.is_complete(observation):
        raise ValueError("belief_update expects a complete observation")
    return coherent_projection(pcr, observation)


@dataclass
class LoadedPcr:
    """A record carrying a coherent excitation, for incremental reasoning."""

    pcr: Pcr
    load: int = 0

    def propagate(self, signal: int, stats: dict | None = None) -> "LoadedPcr":
        new_load = propagate(self.pcr, self.load, signal, stats)
        return LoadedPcr(self.pcr, new_load)
