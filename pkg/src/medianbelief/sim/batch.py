"""Batch execution: many seeded runs in parallel, one CSV log per batch.

CSV schema (header mandatory, UTF-8, '.' decimal separator)::

    run_id,t,mode,pos,target,dist,err_pcr,err_closure,action,value

Observer rows leave ``action`` empty; agent rows leave the error columns
empty.  Per-run generators are split deterministically from the master seed,
and rows are written in run order, so identical configurations produce
byte-identical logs regardless of worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..config import RunConfig
from .bua import run_sniffy
from .env import CIRCLE_BEACONS, INTERVAL_RANDOM, Environment, ValueSignal
from .observer import run_observer

CSV_HEADER = "run_id,t,mode,pos,target,dist,err_pcr,err_closure,action,value"


def _fmt(x: float) -> str:
    return repr(float(x))


def _build_env(cfg: RunConfig, rng: np.random.Generator) -> Environment:
    if cfg.env_kind == INTERVAL_RANDOM:
        return Environment.interval_random(cfg.env_n, rng, seed=cfg.env_seed)
    if cfg.env_kind == CIRCLE_BEACONS:
        return Environment.circle_beacons(cfg.env_n, cfg.env_radius)
    return Environment.interval_gps(cfg.env_n)


def _single_run(args: tuple[RunConfig, int, np.random.SeedSequence]) -> dict:
    cfg, run_id, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    env = _build_env(cfg, rng)
    if cfg.target == "random":
        target = int(rng.integers(0, len(env.positions)))
    else:
        target = int(cfg.target)
    signal = ValueSignal(cfg.signal_family, target, env)
    out: dict = {"run_id": run_id, "target": target}
    if cfg.mode == "observer":
        run = run_observer(
            env,
            signal,
            cfg.snapshot,
            cfg.steps,
            rng,
            sampling=cfg.sampling,
            q=cfg.q,
            tau=cfg.tau,
            delta=cfg.delta,
        )
        out["positions"] = run.positions
        out["values"] = run.values
        out["err_pcr"] = run.err_pcr
        out["err_closure"] = run.err_closure
        out["dists"] = np.array([env.dist(int(p), target) for p in run.positions], dtype=np.int32)
        if run_id == 0:
            out["snapshot"] = run.snapshot
    else:
        run = run_sniffy(
            env,
            signal,
            cfg.snapshot,
            cfg.steps,
            cfg.training,
            rng,
            q=cfg.q,
            tau=cfg.tau,
            delta=cfg.delta,
        )
        out["positions"] = run.positions
        out["values"] = run.values
        out["dists"] = run.dists
        out["actions"] = run.actions
    return out


@dataclass
class BatchResult:
    csv_path: Path
    summary_lines: list[str]
    checkpoint_path: Path | None


def run_batch(cfg: RunConfig, out_dir: str | Path, workers: int | None = None) -> BatchResult:
    """Execute a configured batch; returns log location and summary lines."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.batch)
    jobs = [(cfg, i, children[i]) for i in range(cfg.batch)]
    if workers is None:
        workers = min(cfg.batch, os.cpu_count() or 1)
        if os.environ.get("MEDIANBELIEF_WORKERS"):
            workers = int(os.environ["MEDIANBELIEF_WORKERS"])
    if workers <= 1 or cfg.batch == 1:
        results = [_single_run(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_single_run, jobs, chunksize=1))

    csv_path = out_dir / f"{cfg.name}.csv"
    every = cfg.record_every
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for res in results:
            run_id, target = res["run_id"], res["target"]
            steps = len(res["positions"])
            observer = cfg.mode == "observer"
            for t in range(steps):
                if t % every and t != steps - 1:
                    continue
                pos = int(res["positions"][t])
                dist = int(res["dists"][t])
                if observer:
                    err_p = _fmt(res["err_pcr"][t])
                    err_c = _fmt(res["err_closure"][t])
                    action = ""
                else:
                    err_p = err_c = ""
                    action = res["actions"][t]
                value = _fmt(res["values"][t])
                fh.write(
                    f"{run_id},{t},{cfg.mode},{pos},{target},{dist},{err_p},{err_c},{action},{value}\n"
                )

    final_t = cfg.steps - 1
    summary = [f"seed={cfg.seed}{' (generated)' if cfg.seed_generated else ''}"]
    if cfg.mode == "observer":
        for metric in ("err_pcr", "err_closure"):
            finals = np.array([res[metric][-1] for res in results])
            summary.append(
                f"summary mode=observer metric={metric} t={final_t} "
                f"mean={_fmt(finals.mean())} std={_fmt(finals.std())} runs={cfg.batch}"
            )
    else:
        finals = np.array([res["dists"][-1] for res in results], dtype=float)
        summary.append(
            f"summary mode=sniffy metric=dist t={final_t} "
            f"mean={_fmt(finals.mean())} std={_fmt(finals.std())} runs={cfg.batch}"
        )

    checkpoint_path = None
    if cfg.mode == "observer" and "snapshot" in results[0]:
        from ..checkpoint import save_snapshot

        checkpoint_path = out_dir / f"{cfg.name}.ckpt"
        save_snapshot(checkpoint_path, results[0]["snapshot"])

    with open(out_dir / f"{cfg.name}.summary.txt", "w", encoding="utf-8") as fh:
        fh.write("\n".join(summary) + "\n")
    return BatchResult(csv_path=csv_path, summary_lines=summary, checkpoint_path=checkpoint_path)
