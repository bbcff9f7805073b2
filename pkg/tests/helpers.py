"""Shared fixtures: the small named records every suite leans on."""

from __future__ import annotations

from medianbelief import Pcr, Sigma


def path_record(length: int) -> Pcr:
    """Threshold sensors on a line: a1 -> a2 -> ... -> aL; dual is a path."""
    sigma = Sigma(length, tuple(f"a{i}" for i in range(1, length + 1)))
    return Pcr(sigma, [(2 * i, 2 * i + 2) for i in range(1, length)])


def starfish_record(length: int) -> Pcr:
    """Beacon sensors on a line: ai -> aj* for i < j; dual is a star."""
    sigma = Sigma(length, tuple(f"a{i}" for i in range(1, length + 1)))
    pairs = []
    for i in range(1, length + 1):
        for j in range(i + 1, length + 1):
            pairs.append((2 * i, 2 * j + 1))
    return Pcr(sigma, pairs)


def compass_record() -> Pcr:
    """Four direction queries with opposite pairs exclusive; dual is a 4-cycle."""
    sigma = Sigma(4, ("n", "w", "s", "e"))
    n, w, s, e = 2, 4, 6, 8
    return Pcr(sigma, [(n, s + 1), (w, e + 1)])


def grid_record(length: int) -> Pcr:
    """Direct sum of two equal paths; dual is the (L+1) x (L+1) grid."""
    return path_record(length).direct_sum(path_record(length))
