"""Binary agents: per-action snapshots, prediction by propagation, divergence decisions.

Each action gets an agent deciding every cycle whether to fire.  The agent
holds two snapshots over an alphabet extended with one-step-delayed copies of
every query: one snapshot updated exactly on the transitions where the action
fired, the other exactly on the transitions where it rested.  To choose, the
agent predicts the next sensation under each branch -- the coherent repair of
the time-shifted belief state under that branch's derived record -- and fires
iff the fired-branch prediction is closer (by divergence) to that branch's
learned target region.  A hard-wired arbiter never lets opposite moves fire
together.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..alphabet import Sigma, bool_from_mask
from ..propagation import coherent_projection_masks
from ..relations import Pcr
from .. import snapshot_qual, snapshot_real
from ..snapshot_qual import QualSnapshot
from ..snapshot_real import RealSnapshot
from .env import Environment, ValueSignal, apply_action
from .observer import make_snapshot

ACTIONS = ("rt", "lt")


def delayed_extend(sigma: Sigma) -> Sigma:
    """Double the alphabet with one-step-delayed copies of every query."""
    names = tuple(sigma.names) + tuple("#" + name for name in sigma.names)
    return Sigma(2 * sigma.n_pairs, names)


def embed_delayed(n_base_pairs: int, raw: int) -> int:
    """Place a base observation into the delayed half of the extended alphabet."""
    return (raw & ~3) << (2 * n_base_pairs)


def shift_delayed(n_base_pairs: int, bits: int) -> int:
    """The time-shift of a literal set: base literals become their delayed copies.

    Delayed literals have no further delay and drop out; the constant-true
    query survives the shift.
    """
    proper_base = ((1 << (2 * n_base_pairs)) - 1) << 2
    return ((bits & proper_base) << (2 * n_base_pairs)) | (bits & 0b10)


def succ_masks_from_matrix(sigma: Sigma, rel: np.ndarray) -> list[int]:
    """Successor bit masks (with the forced 0/1 base) from a relation matrix."""
    n = sigma.n_literals
    packed = np.packbits(rel, axis=1, bitorder="little")
    width = packed.shape[1]
    blob = packed.tobytes()
    one = 1 << 1
    succ = [
        int.from_bytes(blob[i * width:(i + 1) * width], "little") | one for i in range(n)
    ]
    succ[0] = sigma.full_mask
    return succ


def orthogonal_succ_masks(sigma: Sigma) -> list[int]:
    one = 1 << 1
    succ = [one] * sigma.n_literals
    succ[0] = sigma.full_mask
    return succ


class BuaAgent:
    """One action's decision maker, with fired/rested conditioned snapshots."""

    def __init__(
        self,
        action: str,
        sigma: Sigma,
        snapshot_kind: str,
        n_queries: int,
        q: float | None = None,
        tau: float | None = None,
        delta: float = 0.0,
    ):
        self.action = action
        self.sigma = sigma
        self.n_base_pairs = sigma.n_pairs // 2
        if snapshot_kind == "qualitative":
            make = lambda: QualSnapshot(sigma, delta=delta)
        else:
            eff_tau = snapshot_real.default_threshold(n_queries) if tau is None else tau
            if snapshot_kind == "empirical":
                make = lambda: RealSnapshot(sigma, tau=eff_tau, q=None)
            elif snapshot_kind == "discounted":
                make = lambda: RealSnapshot(sigma, tau=eff_tau, q=q)
            else:
                raise ValueError(f"unknown snapshot kind {snapshot_kind!r}")
        self.snapshots: dict[bool, QualSnapshot | RealSnapshot] = {True: make(), False: make()}
        self.update_counts = {True: 0, False: 0}
        self._derived_cache: dict[bool, tuple[list[int], int] | None] = {True: None, False: None}

    def update(self, acted: bool, observation: int, value: float) -> None:
        """Fold the arriving observation into the snapshot the transition conditions."""
        snap = self.snapshots[acted]
        changed = snap.update(observation, value)
        self.update_counts[acted] += 1
        if changed is None or changed:
            self._derived_cache[acted] = None

    def derived(self, acted: bool) -> tuple[list[int], int]:
        """Successor masks of the branch's derived record, and its minset.

        A snapshot that has seen nothing (or, for the statistical kind, only
        zero mass) yields the orthogonal record and an empty minset: the agent
        knows nothing under that branch yet.
        """
        cached = self._derived_cache[acted]
        if cached is not None:
            return cached
        snap = self.snapshots[acted]
        if isinstance(snap, QualSnapshot):
            usable = snap.initialized
            rel = None if not usable else snapshot_qual.derived_matrix(self.sigma, snap.w, snap.delta)
        else:
            usable = snap.initialized and not snap.is_trivial()
            rel = None if not usable else snapshot_real.derived_matrix(self.sigma, snap.w, snap.tau)
        if rel is None:
            succ = orthogonal_succ_masks(self.sigma)
        else:
            succ = succ_masks_from_matrix(self.sigma, rel)
        out = (succ, snap.minset())
        self._derived_cache[acted] = out
        return out

    def predict(self, acted: bool, observation: int) -> int:
        """The sensations provable for the next cycle if the branch is taken."""
        succ, _ = self.derived(acted)
        star = self.sigma.star
        current = coherent_projection_masks(succ, star, observation)
        shifted = shift_delayed(self.n_base_pairs, current)
        return coherent_projection_masks(succ, star, shifted)

    def divergences(self, observation: int) -> dict[bool, int]:
        out = {}
        for acted in (True, False):
            _, minset = self.derived(acted)
            prediction = self.predict(acted, observation)
            out[acted] = (minset & ~prediction).bit_count()
        return out

    def decide(self, observation: int, rng: np.random.Generator) -> bool:
        """Fire iff firing promises the smaller divergence to target; coin on ties."""
        div = self.divergences(observation)
        if div[True] < div[False]:
            return True
        if div[True] > div[False]:
            return False
        return bool(rng.integers(0, 2))


def arbitrate(rt_wants: bool, lt_wants: bool, rng: np.random.Generator) -> str:
    """Joint action from the two agents' wishes; opposite moves never co-fire."""
    if rt_wants and lt_wants:
        return "rt" if rng.integers(0, 2) else "lt"
    if rt_wants:
        return "rt"
    if lt_wants:
        return "lt"
    return "stay"


@dataclass
class SniffyRun:
    positions: np.ndarray
    dists: np.ndarray
    values: np.ndarray
    actions: list[str]
    target: int
    start: int
    agents: dict[str, BuaAgent]

    @property
    def final_dist(self) -> int:
        return int(self.dists[-1])


def run_sniffy(
    env: Environment,
    signal: ValueSignal,
    snapshot_kind: str,
    steps: int,
    training: int,
    rng: np.random.Generator,
    q: float | None = None,
    tau: float | None = None,
    delta: float = 0.0,
    start: int | None = None,
    agents: dict[str, BuaAgent] | None = None,
) -> SniffyRun:
    """A full agent run: training under random overrides, then agent control.

    During training every decision is overridden by a uniform draw over
    {lt, stay, rt}, so the agent experiences a lazy walk; afterwards the two
    agents control the moves through arbitration.  Pass pre-built ``agents``
    (e.g. at their exploration limit) to study post-training behavior alone.
    """
    if snapshot_kind == "discounted" and q is None:
        q = 1.0 - 1.0 / (env.n + 1)
    sigma_ext = delayed_extend(env.sigma)
    if agents is None:
        agents = {
            action: BuaAgent(action, sigma_ext, snapshot_kind, env.n, q=q, tau=tau, delta=delta)
            for action in ACTIONS
        }
    if start is None:
        start = int(rng.integers(0, len(env.positions)))
    pos = start
    n_base = env.sigma.n_pairs
    prev_raw = env.sense(pos)
    last_action: str | None = None

    positions = np.empty(steps, dtype=np.int32)
    dists = np.empty(steps, dtype=np.int32)
    values = np.empty(steps)
    actions: list[str] = []

    for t in range(steps):
        raw = env.sense(pos)
        obs = raw | embed_delayed(n_base, prev_raw)
        value = signal.value(pos)
        if t > 0:
            agents["rt"].update(last_action == "rt", obs, value)
            agents["lt"].update(last_action == "lt", obs, value)
        if t < training:
            action = ("lt", "stay", "rt")[int(rng.integers(0, 3))]
        else:
            rt_wants = agents["rt"].decide(obs, rng)
            lt_wants = agents["lt"].decide(obs, rng)
            action = arbitrate(rt_wants, lt_wants, rng)
        positions[t] = pos
        dists[t] = env.dist(pos, signal.target)
        values[t] = value
        actions.append(action)
        prev_raw = raw
        last_action = action
        pos = apply_action(env, pos, action)

    return SniffyRun(
        positions=positions,
        dists=dists,
        values=values,
        actions=actions,
        target=signal.target,
        start=start,
        agents=agents,
    )


# -- exhaustive-exposure fixtures ---------------------------------------------------


def branch_moves(action: str, acted: bool) -> tuple[str, ...]:
    """The joint moves consistent with one branch of one agent, under arbitration."""
    if acted:
        return (action,)
    other = "lt" if action == "rt" else "rt"
    return ("stay", other)


def converged_table(
    env: Environment, signal: ValueSignal, action: str, acted: bool
) -> np.ndarray:
    """Exact limit of a branch's qualitative snapshot under full exploration.

    Minimum over every transition the branch conditions on, of the arriving
    observation's rank table.
    """
    sigma_ext = delayed_extend(env.sigma)
    n = sigma_ext.n_literals
    n_base = env.sigma.n_pairs
    w = np.full((n, n), snapshot_qual.INF)
    for p_prev in env.positions:
        for move in branch_moves(action, acted):
            p_next = apply_action(env, p_prev, move)
            obs = env.sense(p_next) | embed_delayed(n_base, env.sense(p_prev))
            members = bool_from_mask(obs, n)
            block = w[np.ix_(members, members)]
            np.minimum(block, signal.value(p_next), out=block)
            w[np.ix_(members, members)] = block
    return w


def converged_agent(env: Environment, signal: ValueSignal, action: str, delta: float = 0.0) -> BuaAgent:
    """An agent whose qualitative snapshots sit at their exact exploration limit."""
    sigma_ext = delayed_extend(env.sigma)
    agent = BuaAgent(action, sigma_ext, "qualitative", env.n, delta=delta)
    for acted in (True, False):
        snap = agent.snapshots[acted]
        assert isinstance(snap, QualSnapshot)
        snap.w = converged_table(env, signal, action, acted)
    return agent


def transition_ground_truth(env: Environment, moves: tuple[str, ...] = ("lt", "stay", "rt")) -> Pcr:
    """Implications over the delayed-extended alphabet holding on every transition."""
    sigma_ext = delayed_extend(env.sigma)
    n = sigma_ext.n_literals
    n_base = env.sigma.n_pairs
    observations = []
    for p_prev in env.positions:
        for move in moves:
            p_next = apply_action(env, p_prev, move)
            observations.append(env.sense(p_next) | embed_delayed(n_base, env.sense(p_prev)))
    holds = np.zeros((n, len(observations)), dtype=bool)
    for col, obs in enumerate(observations):
        holds[:, col] = bool_from_mask(obs, n)
    mat = np.zeros((n, n), dtype=bool)
    for a in range(n):
        mat[a] = ~np.any(holds[a][None, :] & ~holds, axis=1)
    pair = np.arange(n) // 2
    mat &= pair[:, None] != pair[None, :]
    return Pcr.from_bool_matrix(sigma_ext, mat)
