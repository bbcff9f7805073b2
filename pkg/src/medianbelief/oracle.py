"""Independent brute-force references for the closed-form operations.

Everything here recomputes a result the long way -- breadth-first search on
the enumerated model space, exhaustive triple checks, power iteration -- so
the fast formula-based paths have something honest to be compared against.
Failures carry a reproducible counterexample (seed and inputs).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .alphabet import Sigma, bool_from_mask, proper_pairs_matrix
from .geometry import DualSpace, convex_hull, enumerate_dual, halfspace, median
from .propagation import coherent_projection, propagate
from .relations import Pcr
from .snapshot_qual import QualSnapshot, Ranking, completion


class NonUniqueProjectionError(RuntimeError):
    """BFS found several nearest vertices: the target was not convex (or the space is broken)."""


@dataclass
class OracleReport:
    """Outcome of one brute-force cross-check."""

    case: str
    ok: bool
    checked: int = 0
    counterexample: dict[str, Any] = field(default_factory=dict)

    def __str__(self):
        status = "pass" if self.ok else "FAIL"
        extra = f" counterexample={self.counterexample}" if not self.ok else ""
        return f"[{status}] {self.case} (checked {self.checked}){extra}"


# -- random instances ----------------------------------------------------------


def random_sigma(rng: np.random.Generator, n_pairs: int) -> Sigma:
    return Sigma(n_pairs)


def random_pcr(rng: np.random.Generator, n_pairs: int, n_relations: int | None = None) -> Pcr:
    """A random record; may be degenerate."""
    sigma = Sigma(n_pairs)
    if n_relations is None:
        n_relations = int(rng.integers(0, 2 * n_pairs + 1))
    pcr = Pcr(sigma)
    for _ in range(n_relations):
        a = int(rng.integers(2, sigma.n_literals))
        b = int(rng.integers(2, sigma.n_literals))
        if b // 2 == a // 2:
            continue
        pcr.insert(a, b)
    return pcr


def random_nondegenerate_pcr(
    rng: np.random.Generator, n_pairs: int, n_relations: int | None = None
) -> Pcr:
    """A random non-degenerate record, built by rejecting degenerating inserts."""
    sigma = Sigma(n_pairs)
    if n_relations is None:
        n_relations = int(rng.integers(0, 2 * n_pairs + 1))
    accepted: list[tuple[int, int]] = []
    for _ in range(n_relations):
        a = int(rng.integers(2, sigma.n_literals))
        b = int(rng.integers(2, sigma.n_literals))
        if b // 2 == a // 2:
            continue
        trial = Pcr(sigma, accepted + [(a, b)])
        if not trial.is_degenerate():
            accepted.append((a, b))
    return Pcr(sigma, accepted)


def random_coherent_set(rng: np.random.Generator, dual: DualSpace, max_size: int | None = None) -> int:
    """A random coherent literal set: a random subset of a random vertex."""
    u = dual.vertices[int(rng.integers(0, len(dual.vertices)))]
    literals = dual.pcr.sigma.literals(u)
    if max_size is None:
        max_size = len(literals)
    size = int(rng.integers(0, max_size + 1))
    picks = rng.choice(len(literals), size=min(size, len(literals)), replace=False)
    out = 0
    for i in picks:
        out |= 1 << literals[int(i)]
    return out


def random_literal_set(rng: np.random.Generator, sigma: Sigma) -> int:
    bits = int(rng.integers(0, 1 << (sigma.n_literals - 2)))
    return bits << 2


def random_ranking(rng: np.random.Generator, sigma: Sigma, max_rank: int = 6) -> Ranking:
    """A random ranking: independent ranks per world, some infinite."""
    values = {}
    for u in sigma.vertices():
        if rng.random() < 0.25:
            continue
        values[u] = int(rng.integers(0, max_rank + 1))
    if not values:
        values[next(iter(sigma.vertices()))] = 0
    return Ranking(sigma, values)


# -- brute-force references -------------------------------------------------------


def bfs_project(dual: DualSpace, u: int, targets: list[int]) -> int:
    """The unique hop-distance minimizer of a vertex set; uniqueness is asserted."""
    if not targets:
        raise ValueError("cannot project onto an empty vertex set")
    dist = dual.bfs_distances(u)
    index = dual.index
    best = None
    best_d = None
    ties = 0
    for v in targets:
        d = dist[index[v]]
        if d < 0:
            continue
        if best_d is None or d < best_d:
            best, best_d, ties = v, d, 1
        elif d == best_d:
            ties += 1
    if best is None:
        raise ValueError("target set unreachable")
    if ties > 1:
        raise NonUniqueProjectionError(
            f"{ties} vertices at distance {best_d}: target not convex or space broken"
        )
    return best


def pointwise_projection_set(dual: DualSpace, sources: list[int], targets: list[int]) -> set[int]:
    """{nearest target vertex from each source}, via breadth-first search."""
    return {bfs_project(dual, u, targets) for u in sources}


def _interval_masks(dual: DualSpace) -> list[list[int]]:
    """interval_masks[i][j]: packed vertex-index mask of the interval between i and j."""
    n = len(dual.vertices)
    out: list[list[int]] = [[0] * n for _ in range(n)]
    for i in range(n):
        u = dual.vertices[i]
        for j in range(i, n):
            core = u & dual.vertices[j]
            mask = 0
            for k in range(n):
                if core & ~dual.vertices[k] == 0:
                    mask |= 1 << k
            out[i][j] = mask
            out[j][i] = mask
    return out


def check_median_axioms(
    dual: DualSpace,
    rng: np.random.Generator | None = None,
    sample_triples: int | None = None,
    retraction_samples: int = 20,
) -> OracleReport:
    """Median uniqueness and the majority formula, triple by triple.

    Exhaustive when ``sample_triples`` is None; also spot-checks that
    nearest-point projection onto sampled convex sets is median-preserving
    and distance non-increasing.
    """
    verts = dual.vertices
    n = len(verts)
    case = f"median axioms on {n} vertices"
    if n == 0:
        return OracleReport(case, False, 0, {"reason": "empty model space"})
    intervals = _interval_masks(dual)
    checked = 0

    if sample_triples is None:
        triples = (
            (i, j, k)
            for i in range(n)
            for j in range(i, n)
            for k in range(j, n)
        )
    else:
        assert rng is not None
        triples = (
            tuple(int(x) for x in rng.integers(0, n, size=3)) for _ in range(sample_triples)
        )

    for i, j, k in triples:
        common = intervals[i][j] & intervals[j][k] & intervals[i][k]
        count = common.bit_count()
        m = median(verts[i], verts[j], verts[k])
        checked += 1
        if count != 1 or m not in dual.index or not (common >> dual.index[m]) & 1:
            return OracleReport(
                case,
                False,
                checked,
                {"triple": (verts[i], verts[j], verts[k]), "count": count, "formula": m},
            )

    if rng is not None:
        for _ in range(retraction_samples):
            base = random_coherent_set(rng, dual)
            targets = halfspace(dual, dual.pcr.up(base))
            if not targets:
                continue
            picks = [verts[int(x)] for x in rng.integers(0, n, size=6)]
            m = median(picks[0], picks[1], picks[2])
            proj = {}
            for u in {*picks, m}:
                try:
                    proj[u] = bfs_project(dual, u, targets)
                except NonUniqueProjectionError:
                    return OracleReport(case, False, checked, {"convex": base, "point": u})
            for u, v in zip(picks[::2], picks[1::2]):
                if dual.distance(proj[u], proj[v]) > dual.distance(u, v):
                    return OracleReport(case, False, checked, {"pair": (u, v), "reason": "expansion"})
            u, v, w = picks[:3]
            if proj[m] != median(proj[u], proj[v], proj[w]):
                return OracleReport(case, False, checked, {"triple": (u, v, w), "reason": "median"})
            checked += 4
    return OracleReport(case, True, checked)


def ranking_min_hull(ranking: Ranking, derived: Pcr) -> OracleReport:
    """Global minima of a ranking versus its completion, checked in the derived space.

    Asserts: minima of the completion form exactly the vertex set over the
    minset, they contain the ranking's own minima, and they are that set's
    convex hull.
    """
    sigma = ranking.sigma
    case = f"ranking minima hull on {sigma.n_pairs} pairs"
    dual = enumerate_dual(derived)
    snap = ranking.two_restriction()
    hat = completion(snap)
    minima = set(ranking.global_minima())
    hat_minima = set(hat.global_minima())
    checked = len(dual)

    if not minima <= hat_minima:
        return OracleReport(case, False, checked, {"reason": "minima escape completion minima"})
    if not hat_minima <= set(dual.vertices):
        return OracleReport(case, False, checked, {"reason": "completion minima outside model space"})
    plateau = set(halfspace(dual, snap.minset()))
    if hat_minima != plateau:
        return OracleReport(
            case, False, checked,
            {"reason": "minset vertex set mismatch", "minima": sorted(hat_minima), "plateau": sorted(plateau)},
        )
    hull = set(convex_hull(dual, sorted(minima)))
    if hat_minima != hull:
        return OracleReport(case, False, checked, {"reason": "hull mismatch"})
    return OracleReport(case, True, checked)


def power_iteration(transition: np.ndarray, residual: float = 1e-12, max_iter: int = 1_000_000) -> np.ndarray:
    """Stationary distribution of a row-stochastic matrix, to a tiny residual."""
    n = transition.shape[0]
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = pi @ transition
        if np.abs(nxt - pi).max() < residual:
            return nxt / nxt.sum()
        pi = nxt
    raise RuntimeError("power iteration did not converge")


def stationary_distribution(env) -> np.ndarray:
    """Stationary distribution of an environment's lazy-walk chain."""
    return power_iteration(env.lazy_transition_matrix())


# -- suite glue --------------------------------------------------------------------


def _compare_propagation(rng: np.random.Generator, n_pairs: int) -> OracleReport:
    pcr = random_nondegenerate_pcr(rng, n_pairs)
    dual = enumerate_dual(pcr)
    case = f"propagation vs BFS on {n_pairs} pairs"
    if not dual.vertices:
        return OracleReport(case, False, 0, {"reason": "empty dual"})
    load = random_coherent_set(rng, dual, max_size=max(2, n_pairs // 2 + 1))
    signal = random_literal_set(rng, pcr.sigma)
    base = propagate(pcr, load, signal)
    formula_side = set(halfspace(dual, base))
    sources = halfspace(dual, pcr.up(load))
    targets = halfspace(dual, coherent_projection(pcr, signal))
    bfs_side = pointwise_projection_set(dual, sources, targets)
    ok = formula_side == bfs_side
    return OracleReport(
        case,
        ok,
        len(sources),
        {} if ok else {"load": load, "signal": signal, "pcr": sorted(pcr.generating_pairs())},
    )


def verify_suite(seed: int = 0, quick: bool = False) -> list[OracleReport]:
    """The standing cross-check battery used by the command-line ``verify``."""
    rng = np.random.default_rng(seed)
    reports: list[OracleReport] = []

    n_prop = 40 if quick else 300
    bad = None
    checked = 0
    for _ in range(n_prop):
        rep = _compare_propagation(rng, int(rng.integers(1, 7 if quick else 9)))
        checked += rep.checked
        if not rep.ok:
            bad = rep
            break
    reports.append(bad or OracleReport(f"propagation vs BFS ({n_prop} records)", True, checked))

    n_med = 6 if quick else 20
    bad = None
    checked = 0
    for _ in range(n_med):
        pcr = random_nondegenerate_pcr(rng, int(rng.integers(1, 6 if quick else 8)))
        dual = enumerate_dual(pcr)
        rep = check_median_axioms(dual, rng, sample_triples=None if len(dual) <= 64 else 2000)
        checked += rep.checked
        if not rep.ok:
            bad = rep
            break
    reports.append(bad or OracleReport(f"median axioms ({n_med} records)", True, checked))

    n_coh = 100 if quick else 400
    bad = None
    for _ in range(n_coh):
        pcr = random_nondegenerate_pcr(rng, int(rng.integers(1, 7)))
        sigma = pcr.sigma
        t = random_literal_set(rng, sigma)
        coh = coherent_projection(pcr, t)
        ok = (
            pcr.is_coherent(coh)
            and pcr.up(coh) == coh
            and coherent_projection(pcr, coh) == coh
        )
        if ok:
            obs = sigma.random_vertex(rng)
            state = coherent_projection(pcr, obs)
            dual = enumerate_dual(pcr)
            best = min(pcr.quotient_set_distance(obs, v) for v in dual.vertices)
            ok = all(
                state & ~v == 0
                for v in dual.vertices
                if pcr.quotient_set_distance(obs, v) == best
            )
        if not ok:
            bad = OracleReport("coherent projection laws", False, n_coh, {"signal": t, "pcr": sorted(pcr.generating_pairs())})
            break
    reports.append(bad or OracleReport(f"coherent projection laws ({n_coh} cases)", True, n_coh))

    n_quot = 50 if quick else 200
    bad = None
    for _ in range(n_quot):
        pcr = random_nondegenerate_pcr(rng, int(rng.integers(1, 7)))
        dual = enumerate_dual(pcr)
        quo = pcr.canonical_quotient()
        qdual = enumerate_dual(quo.pcr)
        lifted = sorted(quo.lift_vertex(v) for v in qdual.vertices)
        if lifted != dual.vertices:
            bad = OracleReport("quotient duality", False, n_quot, {"pcr": sorted(pcr.generating_pairs())})
            break
    reports.append(bad or OracleReport(f"quotient duality ({n_quot} records)", True, n_quot))

    n_rank = 30 if quick else 100
    bad = None
    for _ in range(n_rank):
        sigma = Sigma(int(rng.integers(1, 5 if quick else 6)))
        ranking = random_ranking(rng, sigma)
        rep = ranking_min_hull(ranking, ranking.two_restriction().derived_pcr())
        if not rep.ok:
            bad = rep
            break
    reports.append(bad or OracleReport(f"ranking minima hull ({n_rank} rankings)", True, n_rank))

    return reports
