"""Command-line entry points: simulate, verify, inspect.

Exit codes: 0 success, 1 verification failure, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .checkpoint import CheckpointError, load_snapshot
from .config import ConfigError, load_config
from .geometry import ENUMERATION_CAP, enumerate_dual
from .oracle import verify_suite
from .snapshot_qual import QualSnapshot, UninitializedSnapshotError
from .snapshot_real import TrivialSnapshotError


def _cmd_simulate(args) -> int:
    from .sim.batch import run_batch

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.seed_generated = False
    result = run_batch(cfg, args.out, workers=args.workers)
    print(f"wrote {result.csv_path}")
    if result.checkpoint_path:
        print(f"wrote {result.checkpoint_path}")
    for line in result.summary_lines:
        print(line)
    return 0


def _cmd_verify(args) -> int:
    reports = verify_suite(seed=args.seed if args.seed is not None else 0, quick=args.quick)
    failures = [r for r in reports if not r.ok]
    for report in reports:
        print(report)
    if failures:
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            dump = out / "verify_failures.txt"
            dump.write_text("\n".join(str(r) for r in failures) + "\n", encoding="utf-8")
            print(f"counterexamples written to {dump}", file=sys.stderr)
        print(f"{len(failures)} suite(s) failed", file=sys.stderr)
        return 1
    print("all suites passed")
    return 0


def _cmd_inspect(args) -> int:
    try:
        snapshot = load_snapshot(args.checkpoint)
    except (CheckpointError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sigma = snapshot.sigma
    kind = "qualitative" if isinstance(snapshot, QualSnapshot) else "real-valued"
    print(f"# {kind} snapshot over {sigma.n_pairs} queries")
    try:
        pcr = snapshot.derived_pcr()
    except (UninitializedSnapshotError, TrivialSnapshotError) as exc:
        print(f"# no derivable record: {exc}")
        return 0
    print(pcr.dump(), end="")
    print(f"# minset: {sigma.format_set(snapshot.minset())}")
    if not pcr.is_degenerate():
        quotient = pcr.canonical_quotient()
        print(f"# quotient classes: {len(quotient.classes)}")
        if args.dual:
            if sigma.n_pairs > ENUMERATION_CAP:
                print(f"# dual omitted: {sigma.n_pairs} pairs exceeds the enumeration cap", file=sys.stderr)
            else:
                dual = enumerate_dual(pcr)
                print(f"# dual: {len(dual)} vertices")
                for i, j in dual.edges():
                    left = sigma.format_set(dual.vertices[i])
                    right = sigma.format_set(dual.vertices[j])
                    print(f"{left} -- {right}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="medianbelief",
        description="Run learning experiments, verify the geometry, inspect learned records.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a configured experiment batch")
    p_sim.add_argument("--config", required=True, help="INI run configuration")
    p_sim.add_argument("--out", default=".", help="output directory for CSV logs")
    p_sim.add_argument("--seed", type=int, default=None, help="override the run seed")
    p_sim.add_argument("--workers", type=int, default=None, help="parallel run workers")
    p_sim.set_defaults(func=_cmd_simulate)

    p_ver = sub.add_parser("verify", help="run the brute-force cross-check battery")
    p_ver.add_argument("--quick", action="store_true", help="reduced instance counts (< 10 s)")
    p_ver.add_argument("--seed", type=int, default=None, help="suite seed")
    p_ver.add_argument("--out", default=None, help="directory for counterexample dumps")
    p_ver.set_defaults(func=_cmd_verify)

    p_ins = sub.add_parser("inspect", help="report on a snapshot checkpoint")
    p_ins.add_argument("checkpoint", help="snapshot checkpoint file")
    p_ins.add_argument("--dual", action="store_true", help="also list the model-space edges")
    p_ins.set_defaults(func=_cmd_inspect)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
