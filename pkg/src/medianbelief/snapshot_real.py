"""Statistical snapshots: discounted integrators of a real-valued signal.

Each table entry accumulates the (discounted) mass of the value signal seen
on worlds containing both literals of its pair.  With the empirical schedule
the entry is exactly the running average of the per-step contributions; with
a fixed discount it is an exponentially weighted average that lets stale
evidence fade.  Implications are extracted by a thresholded comparison:
``a -> b`` goes on record when the mass witnessing ``a`` without ``b`` is
negligible next to the alternatives and to a fixed fraction of the total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .alphabet import (
    Sigma,
    bool_from_mask,
    disjoint_pairs_matrix,
    star_permutation,
)
from .relations import Pcr
from .snapshot_qual import UninitializedSnapshotError


class TrivialSnapshotError(ValueError):
    """Raised when extracting implications from an all-zero weight table."""


def point_mass_weight(sigma: Sigma, u: int, value: float) -> np.ndarray:
    """Weight table of a single observation: value where both literals hold."""
    if not sigma.is_complete(u):
        raise ValueError("point mass must sit on a complete selection")
    if value < 1:
        raise ValueError("signal values must be at least 1")
    members = bool_from_mask(u, sigma.n_literals)
    w = np.zeros((sigma.n_literals, sigma.n_literals))
    w[np.ix_(members, members)] = float(value)
    return w


def derived_matrix(sigma: Sigma, w: np.ndarray, tau) -> np.ndarray:
    """Boolean implication matrix extracted from a weight table.

    Strict raw comparisons throughout: the thresholds already carry the
    margin.
    """
    perm = star_permutation(sigma)
    domain = disjoint_pairs_matrix(sigma)
    w_empty = w[0, 0] + w[1, 1]
    wstar = w[:, perm]
    wss = w[np.ix_(perm, perm)]
    wsb = w[perm, :]
    cutoff = np.minimum(np.minimum(tau * w_empty, w), np.minimum(wss, wsb))
    rel = (wstar < cutoff) | ((wstar == 0.0) & (wsb == 0.0))
    return rel & domain


@dataclass(frozen=True)
class ConditionViolation:
    condition: int
    residual: float
    where: tuple[int, ...]

    def __str__(self):
        return f"condition {self.condition}: residual {self.residual:.3g} at {self.where}"


class RealSnapshot:
    """Mutable learner state integrating a value signal of magnitude >= 1.

    ``q`` fixes the discount coefficient; leave it ``None`` for the empirical
    schedule, under which the table is the exact running average.
    """

    def __init__(self, sigma: Sigma, tau: float | np.ndarray, q: float | None = None):
        self.sigma = sigma
        if isinstance(tau, np.ndarray):
            _check_threshold_table(sigma, tau)
            self.tau: float | np.ndarray = tau.astype(float)
        else:
            if not 0 < tau < 1:
                raise ValueError("threshold must lie strictly between 0 and 1")
            self.tau = float(tau)
        if q is not None and not 0 < q <= 1:
            raise ValueError("fixed discount must lie in (0, 1]")
        self.q = q
        self.w: np.ndarray | None = None
        self.n_obs = 0

    @property
    def initialized(self) -> bool:
        return self.w is not None

    def update(self, observation: int, value: float) -> None:
        """Fold in one observed world with its signal value."""
        if not self.sigma.is_complete(observation):
            raise ValueError("observation must be a complete selection")
        value = float(value)
        if value < 1:
            raise ValueError("signal values must be at least 1")
        members = np.flatnonzero(bool_from_mask(observation, self.sigma.n_literals))
        if self.w is None:
            self.w = np.zeros((self.sigma.n_literals,) * 2)
            self.w[np.ix_(members, members)] = value
            self.n_obs = 1
            return
        q = self.q if self.q is not None else self.n_obs / (self.n_obs + 1)
        self.w *= q
        block = self.w[np.ix_(members, members)]
        block += (1.0 - q) * value
        self.w[np.ix_(members, members)] = block
        self.n_obs += 1

    def _table(self) -> np.ndarray:
        if self.w is None:
            raise UninitializedSnapshotError("snapshot has no observations yet")
        return self.w

    def w_empty(self) -> float:
        w = self._table()
        return float(w[0, 0] + w[1, 1])

    def is_trivial(self) -> bool:
        return not np.any(self._table() != 0.0)

    def derived_pcr(self) -> Pcr:
        """The learned implication record; non-degenerate for non-trivial tables."""
        w = self._table()
        if not np.any(w != 0.0):
            raise TrivialSnapshotError("cannot derive implications from an all-zero table")
        return Pcr.from_bool_matrix(self.sigma, derived_matrix(self.sigma, w, self.tau))

    def minset(self) -> int:
        """Literals carrying strictly more mass than their complements."""
        if self.w is None:
            return 0
        perm = star_permutation(self.sigma)
        diag = self.w.diagonal()
        keep = diag > diag[perm]
        out = 0
        for x in np.flatnonzero(keep):
            out |= 1 << int(x)
        return out

    def validate(self, eps_num: float | None = None) -> list[ConditionViolation]:
        """Check the five structural weight conditions within a numeric tolerance.

        Returns the violated conditions with their worst residuals; empty
        means valid.
        """
        w = self._table()
        sigma = self.sigma
        n = sigma.n_literals
        perm = star_permutation(sigma)
        if eps_num is None:
            eps_num = 1e-9 * max(self.w_empty(), 1.0)
        out: list[ConditionViolation] = []

        def worst(residuals: np.ndarray, condition: int) -> None:
            flat = int(np.argmax(residuals))
            value = float(residuals.reshape(-1)[flat])
            if value > eps_num:
                where = tuple(int(i) for i in np.unravel_index(flat, residuals.shape))
                out.append(ConditionViolation(condition, value, where))

        worst(np.abs(w - w.T), 0)

        r1 = np.maximum(-w, 0.0)
        r1[0, :] = np.maximum(r1[0, :], np.abs(w[0, :]))
        r1[:, 0] = np.maximum(r1[:, 0], np.abs(w[:, 0]))
        rows = np.arange(n)
        r1[rows, perm] = np.maximum(r1[rows, perm], np.abs(w[rows, perm]))
        worst(r1, 1)

        diag = w.diagonal()
        level = diag + diag[perm]
        worst(np.abs(level - level[0]), 2)

        worst(np.abs(diag[:, None] - (w + w[:, perm])), 3)

        direction = w[perm, :] - w[:, perm]
        r4 = np.abs(direction[:, :, None] + direction[None, :, :] - direction[:, None, :])
        worst(r4, 4)

        total = w[:, perm] + w[perm, :]
        r5 = total[:, None, :] - total[:, :, None] - total[None, :, :]
        worst(np.maximum(r5, 0.0), 5)
        return out


def _check_threshold_table(sigma: Sigma, tau: np.ndarray) -> None:
    n = sigma.n_literals
    if tau.shape != (n, n):
        raise ValueError("threshold table shape does not match the alphabet")
    if np.any(tau <= 0) or np.any(tau >= 1):
        raise ValueError("thresholds must lie strictly between 0 and 1")
    perm = star_permutation(sigma)
    if not (np.array_equal(tau, tau.T) and np.array_equal(tau, tau[perm, :])):
        raise ValueError("thresholds must satisfy tau[a,b] == tau[b,a] == tau[a*,b]")


def default_threshold(n_queries: int) -> float:
    """The standard uniform learning threshold for an environment of n queries."""
    return 1.0 / (2 * n_queries)


# -- concentration bound ---------------------------------------------------------


def kl_divergence(q: float, p: float) -> float:
    """Relative entropy between Bernoulli(q) and Bernoulli(p), natural base."""
    if not (0 < p < 1 and 0 <= q <= 1):
        raise ValueError("kl_divergence needs p in (0,1) and q in [0,1]")
    out = 0.0
    if q > 0:
        out += q * math.log(q / p)
    if q < 1:
        out += (1 - q) * math.log((1 - q) / (1 - p))
    return out


def chernoff_bound(t: int, delta: float, alpha: float, cap: float) -> float:
    """Upper bound on the chance the t+1-sample mean strays delta from truth.

    ``alpha`` is the normalized mean of the per-step contribution and ``cap``
    its maximum value.  Clamped to 1 when vacuous.
    """
    if t < 0:
        raise ValueError("t must be a non-negative integer")
    if delta <= 0 or cap <= 0:
        raise ValueError("delta and cap must be positive")
    if not 0 < alpha < 1:
        raise ValueError("normalized mean must lie strictly between 0 and 1")
    beta = alpha + delta / cap
    gamma = alpha - delta / cap
    if beta >= 1 or gamma <= 0:
        raise ValueError("delta/cap must keep alpha +/- delta/cap inside (0, 1)")
    upper = math.exp(-(t + 1) * kl_divergence(beta, alpha))
    lower = math.exp(-(t + 1) * kl_divergence(1 - gamma, 1 - alpha))
    return min(1.0, upper + lower)
