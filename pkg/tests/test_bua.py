import numpy as np
import pytest

from medianbelief.sim.bua import (
    BuaAgent,
    arbitrate,
    branch_moves,
    converged_agent,
    delayed_extend,
    embed_delayed,
    run_sniffy,
    shift_delayed,
    succ_masks_from_matrix,
    transition_ground_truth,
)
from medianbelief.sim.env import Environment, ValueSignal


def circle_distance(n, a, b):
    d = abs(a - b) % n
    return min(d, n - d)


def test_delayed_extension_counts():
    env = Environment.interval_gps(5)
    ext = delayed_extend(env.sigma)
    assert ext.n_pairs == 10
    assert ext.n_literals == 2 * (2 * 5) + 2
    assert ext.literal_index("#a3") == env.sigma.literal_index("a3") + 10


def test_shift_and_embed():
    env = Environment.interval_gps(3)
    ext = delayed_extend(env.sigma)
    raw = env.sense(1)
    delayed = embed_delayed(3, raw)
    assert delayed == shift_delayed(3, raw) & ~ext.mask(1)
    obs = env.sense(2) | delayed
    assert ext.is_complete(obs)
    # shifting a mixed set keeps constant truth, moves base, drops delayed
    mixed = ext.mask(1, 2, 9) | delayed
    shifted = shift_delayed(3, mixed)
    assert shifted & ext.mask(1)
    assert (shifted >> (2 + 6)) & 1  # base literal 2 moved to its delayed slot
    assert shifted & delayed == shift_delayed(3, 0) | (delayed & shifted)


def test_moving_bead_unconditioned_truth():
    # with free motion, each threshold sensor one step back bounds the next
    env = Environment.interval_gps(5)
    gt = transition_ground_truth(env)
    ext = delayed_extend(env.sigma)
    for j in range(1, 5):
        sharp_j = ext.literal_index(f"#a{j}")
        a_next = ext.literal_index(f"a{j+1}")
        a_j = ext.literal_index(f"a{j}")
        sharp_next = ext.literal_index(f"#a{j+1}")
        assert gt.leq(sharp_j, a_next)
        assert gt.leq(a_j, sharp_next)
    # and the static chain persists in both copies
    assert gt.leq(ext.literal_index("a1"), ext.literal_index("a2"))
    assert gt.leq(ext.literal_index("#a1"), ext.literal_index("#a2"))


def test_circle_transition_truth_for_resting_branch():
    env = Environment.circle_beacons(20, radius=4)
    ext = delayed_extend(env.sigma)
    gt = transition_ground_truth(env, branch_moves("rt", False))
    for k in range(20):
        sharp_k = ext.literal_index(f"#a{k}")
        for off in (9, 10):
            excl = ext.literal_index(f"a{(k + off) % 20}") ^ 1
            assert gt.leq(sharp_k, excl)
        ok = ext.literal_index(f"a{(k + 11) % 20}") ^ 1
        assert not gt.contains(sharp_k, ok)


def test_succ_masks_from_matrix_round_trip():
    rng = np.random.default_rng(90)
    from medianbelief import Sigma

    sigma = Sigma(4)
    rel = rng.random((sigma.n_literals,) * 2) < 0.2
    succ = succ_masks_from_matrix(sigma, rel)
    assert succ[0] == sigma.full_mask
    for a in range(1, sigma.n_literals):
        for b in range(sigma.n_literals):
            if rel[a, b]:
                assert (succ[a] >> b) & 1
    for a in range(sigma.n_literals):
        assert (succ[a] >> 1) & 1


def test_arbitration_never_runs_both():
    rng = np.random.default_rng(91)
    seen = set()
    for _ in range(100):
        seen.add(arbitrate(True, True, rng))
    assert seen == {"rt", "lt"}
    assert arbitrate(True, False, rng) == "rt"
    assert arbitrate(False, True, rng) == "lt"
    assert arbitrate(False, False, rng) == "stay"


def test_fresh_agent_ties_and_coin():
    env = Environment.interval_gps(6)
    ext = delayed_extend(env.sigma)
    agent = BuaAgent("rt", ext, "qualitative", env.n)
    obs = env.sense(2) | embed_delayed(env.sigma.n_pairs, env.sense(2))
    div = agent.divergences(obs)
    assert div[True] == div[False]
    rng = np.random.default_rng(92)
    picks = {agent.decide(obs, rng) for _ in range(40)}
    assert picks == {True, False}


def test_update_counts_condition_on_transitions():
    env = Environment.interval_gps(8)
    sig = ValueSignal("qual-dull", 3, env)
    rng = np.random.default_rng(93)
    run = run_sniffy(env, sig, "qualitative", steps=400, training=400, rng=rng)
    for action in ("rt", "lt"):
        agent = run.agents[action]
        acted = sum(1 for a in run.actions[:-1] if a == action)
        rested = len(run.actions) - 1 - acted
        assert agent.update_counts[True] == acted
        assert agent.update_counts[False] == rested


def test_trace_never_contains_simultaneous_moves():
    env = Environment.circle_beacons(12)
    sig = ValueSignal("qual-dull", 3, env)
    rng = np.random.default_rng(94)
    run = run_sniffy(env, sig, "qualitative", steps=600, training=300, rng=rng)
    assert set(run.actions) <= {"rt", "lt", "stay"}
    # positions follow the executed actions
    for t in range(len(run.actions) - 1):
        move = {"rt": 1, "lt": -1, "stay": 0}[run.actions[t]]
        assert run.positions[t + 1] == (run.positions[t] + move) % 12


def test_predictions_are_closed_coherent():
    env = Environment.circle_beacons(10)
    sig = ValueSignal("qual-dull", 0, env)
    agent = converged_agent(env, sig, "rt")
    n_base = env.sigma.n_pairs
    for k in range(10):
        obs = env.sense(k) | embed_delayed(n_base, env.sense((k - 1) % 10))
        for acted in (True, False):
            succ, minset = agent.derived(acted)
            p = agent.predict(acted, obs)
            from medianbelief.relations import dfs_reach

            assert dfs_reach(succ, p) == p
            assert dfs_reach(succ, minset) == minset
            star = agent.sigma.star
            assert dfs_reach(succ, p) & star(p) == 0


def test_interval_agent_reaches_target():
    env = Environment.interval_gps(12)
    rng = np.random.default_rng(95)
    sig = ValueSignal("qual-dull", 9, env)
    run = run_sniffy(env, sig, "qualitative", steps=1500, training=1200, rng=rng, start=2)
    assert run.dists[-100:].mean() < 1.5
    assert run.dists[-1] <= 2


def test_sharp_interval_agent_reaches_target():
    env = Environment.interval_gps(10)
    rng = np.random.default_rng(96)
    sig = ValueSignal("qual-sharp", 2, env)
    run = run_sniffy(env, sig, "qualitative", steps=1500, training=1200, rng=rng, start=8)
    assert run.dists[-100:].mean() < 1.5


def test_circle_closed_form_divergences():
    env = Environment.circle_beacons(20, radius=4)
    sig = ValueSignal("qual-dull", 0, env)
    lt = converged_agent(env, sig, "lt")
    rt = converged_agent(env, sig, "rt")
    n_base = env.sigma.n_pairs
    for k in range(20):
        obs_lt = env.sense(k) | embed_delayed(n_base, env.sense((k + 1) % 20))
        obs_rt = env.sense(k) | embed_delayed(n_base, env.sense((k - 1) % 20))
        assert lt.divergences(obs_lt)[True] == 4 * min(9, circle_distance(20, 1, k))
        assert rt.divergences(obs_rt)[True] == 4 * min(9, circle_distance(20, 19, k))


def test_pattern_translation_divergence_closed_form():
    # |pattern(k) \ pattern(l)| = 2 min(9, dist(k, l)) on the 20-circle
    env = Environment.circle_beacons(20, radius=4)
    base = env.sigma.n_pairs
    patterns = {k: env.sense(k) for k in range(20)}
    for k in range(20):
        for l in range(20):
            diff = (patterns[l] & ~patterns[k]).bit_count()
            assert diff == 2 * min(9, circle_distance(20, k, l))
