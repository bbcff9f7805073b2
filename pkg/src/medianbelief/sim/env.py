"""Discrete test environments, their sensors, and position-based value signals.

Three environments, all with position-valued state:

* ``interval-gps``: positions 0..N, query ``a_i`` true iff position < i;
  the sensors are nested, so the true implications form a chain.
* ``circle-beacons``: positions 0..N-1 on a ring, query ``a_i`` true iff the
  position is within the beacon radius of i (indices mod N).
* ``interval-random``: positions 0..N, query ``a_i`` true iff the position
  lies in a random proper non-empty subset drawn per run.

Ground truth is the record of all implications that actually hold between
sensor regions; the expected record of a learner is what its snapshot would
derive from the exact limiting weights under a given sampling distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..alphabet import Sigma, bool_from_mask
from ..relations import Pcr
from .. import snapshot_qual, snapshot_real

INTERVAL_GPS = "interval-gps"
CIRCLE_BEACONS = "circle-beacons"
INTERVAL_RANDOM = "interval-random"

QUAL_FAMILIES = ("qual-dull", "qual-sharp")
REAL_FAMILIES = ("real-dull", "real-sharp")


def default_radius(n: int) -> int:
    """Beacon radius fallback: 4 in the reference size, N/5 elsewhere."""
    return 4 if n == 20 else max(1, n // 5)


@dataclass(frozen=True)
class Environment:
    kind: str
    n: int
    radius: int | None = None
    sensor_sets: tuple[frozenset[int], ...] | None = None
    seed: int | None = None

    @classmethod
    def interval_gps(cls, n: int) -> "Environment":
        return cls(INTERVAL_GPS, n)

    @classmethod
    def circle_beacons(cls, n: int, radius: int | None = None) -> "Environment":
        return cls(CIRCLE_BEACONS, n, radius=default_radius(n) if radius is None else radius)

    @classmethod
    def interval_random(cls, n: int, rng: np.random.Generator, seed: int | None = None) -> "Environment":
        positions = n + 1
        sets = []
        for _ in range(n):
            while True:
                picks = frozenset(int(p) for p in range(positions) if rng.random() < 0.5)
                if 0 < len(picks) < positions:
                    break
            sets.append(picks)
        return cls(INTERVAL_RANDOM, n, sensor_sets=tuple(sets), seed=seed)

    def __post_init__(self):
        if self.kind not in (INTERVAL_GPS, CIRCLE_BEACONS, INTERVAL_RANDOM):
            raise ValueError(f"unknown environment kind {self.kind!r}")
        if self.n < 2:
            raise ValueError("environment size must be at least 2")

    @property
    def positions(self) -> range:
        return range(self.n) if self.kind == CIRCLE_BEACONS else range(self.n + 1)

    @property
    def diameter(self) -> int:
        return self.n // 2 if self.kind == CIRCLE_BEACONS else self.n

    def dist(self, p: int, q: int) -> int:
        raw = abs(p - q)
        if self.kind == CIRCLE_BEACONS:
            return min(raw, self.n - raw)
        return raw

    @cached_property
    def sigma(self) -> Sigma:
        if self.kind == CIRCLE_BEACONS:
            names = tuple(f"a{i}" for i in range(self.n))
        else:
            names = tuple(f"a{i}" for i in range(1, self.n + 1))
        return Sigma(self.n, names)

    def query_holds(self, i: int, pos: int) -> bool:
        """Whether base query number i (0-based) reports true at a position."""
        if self.kind == INTERVAL_GPS:
            return pos < i + 1
        if self.kind == CIRCLE_BEACONS:
            return self.dist(i, pos) <= self.radius
        return pos in self.sensor_sets[i]

    def sense(self, pos: int) -> int:
        """The complete observation at a position, as a literal bit vector."""
        if pos not in self.positions:
            raise ValueError(f"position {pos} outside {self.kind} of size {self.n}")
        bits = 1 << 1
        for i in range(self.n):
            lit = 2 * i + 2 + (0 if self.query_holds(i, pos) else 1)
            bits |= 1 << lit
        return bits

    @cached_property
    def observations(self) -> tuple[int, ...]:
        return tuple(self.sense(p) for p in self.positions)

    def truth_region(self, literal: int) -> frozenset[int]:
        """The positions on which a literal reports true."""
        self.sigma.check_literal(literal)
        if literal == 0:
            return frozenset()
        if literal == 1:
            return frozenset(self.positions)
        i = (literal - 2) // 2
        base = frozenset(p for p in self.positions if self.query_holds(i, p))
        return base if literal % 2 == 0 else frozenset(self.positions) - base

    def lazy_transition_matrix(self) -> np.ndarray:
        """Row-stochastic matrix of the lazy walk: left, right, stay at 1/3 each."""
        size = len(self.positions)
        out = np.zeros((size, size))
        for p in self.positions:
            for move in (-1, 0, 1):
                q = p + move
                if self.kind == CIRCLE_BEACONS:
                    q %= self.n
                else:
                    q = min(max(q, 0), self.n)
                out[p, q] += 1.0 / 3.0
        return out


def iid_step(env: Environment, rng: np.random.Generator) -> int:
    return int(rng.integers(0, len(env.positions)))


def lazy_step(env: Environment, pos: int, rng: np.random.Generator) -> int:
    move = int(rng.integers(0, 3)) - 1
    q = pos + move
    if env.kind == CIRCLE_BEACONS:
        return q % env.n
    return min(max(q, 0), env.n)


def apply_action(env: Environment, pos: int, action: str) -> int:
    """Apply rt/lt/stay to a position, clamping or wrapping as the space demands."""
    move = {"rt": 1, "lt": -1, "stay": 0}[action]
    q = pos + move
    if env.kind == CIRCLE_BEACONS:
        return q % env.n
    return min(max(q, 0), env.n)


@dataclass(frozen=True)
class ValueSignal:
    """A position-based significance signal with a distinguished target."""

    family: str
    target: int
    env: Environment = field(repr=False)

    def __post_init__(self):
        if self.family not in QUAL_FAMILIES + REAL_FAMILIES:
            raise ValueError(f"unknown signal family {self.family!r}")
        if self.target not in self.env.positions:
            raise ValueError("target outside the environment")

    @property
    def is_real(self) -> bool:
        return self.family in REAL_FAMILIES

    @property
    def cap(self) -> float:
        """Largest value the signal can emit."""
        if self.family == "qual-dull":
            return 1.0
        if self.family == "qual-sharp":
            return float(self.env.diameter)
        peak = 1.0 + self.env.diameter
        return peak if self.family == "real-dull" else peak**4

    def value(self, pos: int) -> float:
        d = self.env.dist(pos, self.target)
        if self.family == "qual-dull":
            return 0.0 if d == 0 else 1.0
        if self.family == "qual-sharp":
            return float(d)
        dull = 1.0 + self.env.diameter - d
        return dull if self.family == "real-dull" else dull**4


def ground_truth_pcr(env: Environment) -> Pcr:
    """Every implication that actually holds between sensor regions.

    ``a -> b`` is recorded iff the truth region of ``a`` is contained in the
    truth region of ``b``; checked exhaustively over positions.
    """
    sigma = env.sigma
    n = sigma.n_literals
    size = len(env.positions)
    regions = np.zeros((n, size), dtype=bool)
    for lit in range(n):
        for p in env.truth_region(lit):
            regions[lit, p] = True
    mat = np.zeros((n, n), dtype=bool)
    for a in range(n):
        mat[a] = ~np.any(regions[a][None, :] & ~regions, axis=1)
    domain = np.arange(n) // 2
    mat &= domain[:, None] != domain[None, :]
    return Pcr.from_bool_matrix(sigma, mat)


def limiting_qual_table(env: Environment, signal: ValueSignal) -> np.ndarray:
    """Exact limit of a qualitative snapshot exposed to every position."""
    sigma = env.sigma
    n = sigma.n_literals
    w = np.full((n, n), snapshot_qual.INF)
    for p in env.positions:
        members = bool_from_mask(env.sense(p), n)
        block = w[np.ix_(members, members)]
        np.minimum(block, signal.value(p), out=block)
        w[np.ix_(members, members)] = block
    return w


def expected_real_table(env: Environment, signal: ValueSignal, distribution: np.ndarray) -> np.ndarray:
    """Exact expected weight table under a sampling distribution."""
    sigma = env.sigma
    n = sigma.n_literals
    w = np.zeros((n, n))
    for p in env.positions:
        members = bool_from_mask(env.sense(p), n)
        w[np.ix_(members, members)] += distribution[p] * signal.value(p)
    return w


def sampling_distribution(env: Environment, sampling: str) -> np.ndarray:
    """Position distribution of a sampling mode: uniform or the lazy-walk limit."""
    size = len(env.positions)
    if sampling == "iid":
        return np.full(size, 1.0 / size)
    if sampling == "lazy":
        from ..oracle import power_iteration

        return power_iteration(env.lazy_transition_matrix())
    raise ValueError(f"unknown sampling mode {sampling!r}")


def expected_pcr(
    env: Environment,
    signal: ValueSignal,
    snapshot_kind: str,
    sampling: str = "iid",
    tau: float | None = None,
    delta: float = 0.0,
) -> Pcr:
    """The record a given learner converges to, from exact limiting weights."""
    sigma = env.sigma
    if snapshot_kind == "qualitative":
        w = limiting_qual_table(env, signal)
        mat = snapshot_qual.derived_matrix(sigma, w, delta)
    elif snapshot_kind in ("empirical", "discounted"):
        if tau is None:
            tau = snapshot_real.default_threshold(env.n)
        w = expected_real_table(env, signal, sampling_distribution(env, sampling))
        mat = snapshot_real.derived_matrix(sigma, w, tau)
    else:
        raise ValueError(f"unknown snapshot kind {snapshot_kind!r}")
    return Pcr.from_bool_matrix(sigma, mat)
