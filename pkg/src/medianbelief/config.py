"""Run configuration files: INI sections env / signal / learner / run.

Example::

    [env]
    kind = interval-gps
    N = 20

    [signal]
    family = qual-dull
    target = random

    [learner]
    snapshot = qualitative

    [run]
    mode = observer
    sampling = iid
    steps = 10000
    batch = 100
    seed = 12345

Every default is resolvable; a missing run seed is drawn once and logged so
the run stays reproducible from its own output.
"""

from __future__ import annotations

import configparser
import secrets
from dataclasses import dataclass, field
from pathlib import Path

from .sim.env import CIRCLE_BEACONS, INTERVAL_GPS, INTERVAL_RANDOM, QUAL_FAMILIES, REAL_FAMILIES, default_radius


class ConfigError(ValueError):
    """Raised for unreadable or inconsistent run configuration."""


_ENV_KINDS = (INTERVAL_GPS, CIRCLE_BEACONS, INTERVAL_RANDOM)
_MODES = ("observer", "sniffy")
_SNAPSHOTS = ("qualitative", "empirical", "discounted")
_SAMPLING = ("iid", "lazy")


@dataclass
class RunConfig:
    env_kind: str = INTERVAL_GPS
    env_n: int = 20
    env_radius: int | None = None
    env_seed: int | None = None

    signal_family: str = "qual-dull"
    target: int | str = "random"

    snapshot: str = "qualitative"
    q: float | None = None
    tau: float | None = None
    delta: float = 0.0

    mode: str = "observer"
    sampling: str = "iid"
    steps: int = 10_000
    training: int = 2_000
    batch: int = 100
    seed: int = 0
    seed_generated: bool = False
    record_every: int = 1

    name: str = "run"
    extras: dict = field(default_factory=dict)

    def validate(self) -> None:
        def need(cond: bool, where: str, message: str) -> None:
            if not cond:
                raise ConfigError(f"{where}: {message}")

        need(self.env_kind in _ENV_KINDS, "env.kind", f"expected one of {_ENV_KINDS}")
        need(self.env_n >= 2, "env.N", "size must be at least 2")
        if self.env_kind == CIRCLE_BEACONS:
            radius = self.env_radius if self.env_radius is not None else default_radius(self.env_n)
            need(0 < radius < self.env_n // 2 + 1, "env.radius", "radius must fit the circle")
        need(self.signal_family in QUAL_FAMILIES + REAL_FAMILIES, "signal.family", "unknown family")
        need(self.snapshot in _SNAPSHOTS, "learner.snapshot", f"expected one of {_SNAPSHOTS}")
        real = self.signal_family in REAL_FAMILIES
        need(
            real == (self.snapshot != "qualitative"),
            "learner.snapshot",
            "qualitative learners take qual-* signals, statistical learners take real-* ones",
        )
        need(self.mode in _MODES, "run.mode", f"expected one of {_MODES}")
        need(self.sampling in _SAMPLING, "run.sampling", f"expected one of {_SAMPLING}")
        need(self.steps > 0, "run.steps", "steps must be positive")
        need(self.batch > 0, "run.batch", "batch must be positive")
        need(self.record_every > 0, "run.record_every", "record_every must be positive")
        if self.mode == "sniffy":
            need(0 <= self.training <= self.steps, "run.training", "training must fit within steps")
        if isinstance(self.target, int):
            top = self.env_n - 1 if self.env_kind == CIRCLE_BEACONS else self.env_n
            need(0 <= self.target <= top, "signal.target", "target outside the environment")
        else:
            need(self.target == "random", "signal.target", "expected an integer or 'random'")
        if self.q is not None:
            need(0 < self.q <= 1, "learner.q", "discount must lie in (0, 1]")
        if self.tau is not None:
            need(0 < self.tau < 1, "learner.tau", "threshold must lie strictly between 0 and 1")


def _get(parser: configparser.ConfigParser, section: str, key: str, cast, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r} ({exc})") from None


def _maybe_int(raw: str):
    raw = raw.strip()
    try:
        return int(raw)
    except ValueError:
        return raw


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    for section in parser.sections():
        if section not in ("env", "signal", "learner", "run"):
            raise ConfigError(f"unknown section [{section}]")

    cfg = RunConfig(name=path.stem)
    cfg.env_kind = _get(parser, "env", "kind", str, cfg.env_kind).strip()
    cfg.env_n = _get(parser, "env", "n", int, _get(parser, "env", "N", int, cfg.env_n))
    cfg.env_radius = _get(parser, "env", "radius", int, None)
    cfg.env_seed = _get(parser, "env", "seed", int, None)

    cfg.signal_family = _get(parser, "signal", "family", str, cfg.signal_family).strip()
    cfg.target = _get(parser, "signal", "target", _maybe_int, cfg.target)

    cfg.snapshot = _get(parser, "learner", "snapshot", str, cfg.snapshot).strip()
    cfg.q = _get(parser, "learner", "q", float, None)
    cfg.tau = _get(parser, "learner", "tau", float, None)
    cfg.delta = _get(parser, "learner", "delta", float, 0.0)

    cfg.mode = _get(parser, "run", "mode", str, cfg.mode).strip()
    cfg.sampling = _get(parser, "run", "sampling", str, cfg.sampling).strip()
    cfg.steps = _get(parser, "run", "steps", int, cfg.steps)
    cfg.training = _get(parser, "run", "training", int, cfg.training)
    cfg.batch = _get(parser, "run", "batch", int, cfg.batch)
    cfg.record_every = _get(parser, "run", "record_every", int, 1)
    seed = _get(parser, "run", "seed", int, None)
    if seed is None:
        seed = secrets.randbits(32)
        cfg.seed_generated = True
    cfg.seed = seed
    if cfg.env_seed is None:
        cfg.env_seed = cfg.seed + 1

    cfg.validate()
    return cfg
