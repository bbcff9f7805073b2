"""Observer experiments: tracking how fast a learner's record becomes right.

Each run streams sampled positions into one snapshot learner and logs, per
step, two error rates over the ordered proper-literal pair domain:

* ``err_pcr``: disagreement between the derived record and the exact record
  this learner would converge to (its expected record);
* ``err_closure``: disagreement between the transitive closure of the derived
  record and the true implications among the sensors.

The derived record is re-extracted every step, but the closure is only
recomputed when the record actually changed, which after convergence is
never.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..alphabet import bool_from_mask, proper_pairs_matrix
from .. import snapshot_qual, snapshot_real
from ..snapshot_qual import QualSnapshot
from ..snapshot_real import RealSnapshot
from .env import Environment, ValueSignal, expected_pcr, ground_truth_pcr, iid_step, lazy_step

SNAPSHOT_KINDS = ("qualitative", "empirical", "discounted")


def bool_closure(rel: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a boolean relation, by repeated squaring."""
    n = rel.shape[0]
    reach = (rel | np.eye(n, dtype=bool)).astype(np.uint8)
    while True:
        nxt = reach | ((reach @ reach) > 0)
        if np.array_equal(nxt, reach):
            return reach.astype(bool)
        reach = nxt


def closure_with_base(rel: np.ndarray) -> np.ndarray:
    """Closure of a derived relation together with the forced 0/1 implications."""
    full = rel.copy()
    full[0, :] = True
    full[:, 1] = True
    return bool_closure(full)


@dataclass
class ObserverRun:
    positions: np.ndarray
    values: np.ndarray
    err_pcr: np.ndarray
    err_closure: np.ndarray
    target: int
    snapshot: QualSnapshot | RealSnapshot

    @property
    def final_err_pcr(self) -> float:
        return float(self.err_pcr[-1])

    @property
    def final_err_closure(self) -> float:
        return float(self.err_closure[-1])


def make_snapshot(
    env: Environment,
    kind: str,
    q: float | None = None,
    tau: float | None = None,
    delta: float = 0.0,
) -> QualSnapshot | RealSnapshot:
    if kind == "qualitative":
        return QualSnapshot(env.sigma, delta=delta)
    if tau is None:
        tau = snapshot_real.default_threshold(env.n)
    if kind == "empirical":
        return RealSnapshot(env.sigma, tau=tau, q=None)
    if kind == "discounted":
        return RealSnapshot(env.sigma, tau=tau, q=0.999 if q is None else q)
    raise ValueError(f"unknown snapshot kind {kind!r}")


def run_observer(
    env: Environment,
    signal: ValueSignal,
    snapshot_kind: str,
    steps: int,
    rng: np.random.Generator,
    sampling: str = "iid",
    q: float | None = None,
    tau: float | None = None,
    delta: float = 0.0,
) -> ObserverRun:
    """One observer run; all per-step records are returned as arrays."""
    if snapshot_kind not in SNAPSHOT_KINDS:
        raise ValueError(f"unknown snapshot kind {snapshot_kind!r}")
    if signal.is_real == (snapshot_kind == "qualitative"):
        raise ValueError("signal family does not match the snapshot kind")
    sigma = env.sigma
    n = sigma.n_literals
    snapshot = make_snapshot(env, snapshot_kind, q=q, tau=tau, delta=delta)
    if isinstance(snapshot, RealSnapshot):
        eff_tau = snapshot.tau
    else:
        eff_tau = None

    domain = proper_pairs_matrix(sigma)
    denom = int(domain.sum())
    expected = expected_pcr(env, signal, snapshot_kind, sampling=sampling, tau=eff_tau, delta=delta)
    expected_rel = expected.relation_matrix() & domain
    truth_rel = ground_truth_pcr(env).relation_matrix() & domain

    member_idx = [np.flatnonzero(bool_from_mask(obs, n)) for obs in env.observations]
    pos_values = np.array([signal.value(p) for p in env.positions])

    positions = np.empty(steps, dtype=np.int32)
    values = np.empty(steps)
    err_pcr = np.empty(steps)
    err_closure = np.empty(steps)

    last_rel_bytes = None
    cur_err_pcr = cur_err_closure = None
    pos = iid_step(env, rng)
    for t in range(steps):
        if sampling == "iid":
            pos = iid_step(env, rng)
        else:
            pos = lazy_step(env, pos, rng)
        value = pos_values[pos]
        snapshot.update(env.observations[pos], value)

        if isinstance(snapshot, QualSnapshot):
            rel = snapshot_qual.derived_matrix(sigma, snapshot.w, snapshot.delta)
        else:
            rel = snapshot_real.derived_matrix(sigma, snapshot.w, snapshot.tau)
        rel &= domain
        blob = rel.tobytes()
        if blob != last_rel_bytes:
            last_rel_bytes = blob
            cur_err_pcr = float(np.count_nonzero(rel != expected_rel) / denom)
            closed = closure_with_base(rel) & domain
            cur_err_closure = float(np.count_nonzero(closed != truth_rel) / denom)
        positions[t] = pos
        values[t] = value
        err_pcr[t] = cur_err_pcr
        err_closure[t] = cur_err_closure

    return ObserverRun(
        positions=positions,
        values=values,
        err_pcr=err_pcr,
        err_closure=err_closure,
        target=signal.target,
        snapshot=snapshot,
    )
