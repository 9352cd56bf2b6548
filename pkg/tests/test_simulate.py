import numpy as np
import pytest
import scipy.stats

from chargecent import (
    HoppingParams,
    SirParams,
    make_instance,
    particle_hopping,
    run_sir_episode,
    sir_influence,
)
from chargecent.generators import gnp_random_graph, path_graph, star_graph
from chargecent.oracles import plain_sir_outbreaks


def test_sir_zero_probability_never_spreads():
    inst = make_instance(star_graph(4), [], 2)
    out = sir_influence(inst, SirParams(alpha=0.0, runs=5, seed=1))
    assert np.all(out.values == 1.0)


def test_sir_deterministic_star_traces():
    # Full transmission, budget one: the center reaches everyone, a leaf
    # infects only the center (which then has no charge left to spread).
    inst = make_instance(star_graph(4), [], 1)
    out = sir_influence(inst, SirParams(alpha=1.0, runs=3, seed=2))
    assert out.values[0] == 5.0
    assert np.all(out.values[1:] == 2.0)


def test_sir_refill_extends_reach():
    inst = make_instance(path_graph(3), [1], 1)
    out = sir_influence(inst, SirParams(alpha=1.0, runs=2, seed=3))
    assert out.values[0] == 3.0


def test_sir_exhausted_attacker_still_reaches_refill_neighbor():
    # 0-1-2 with only node 2 refilling: seed 0 at kappa=1 infects 1 (charge 0),
    # node 1 can still pass to the refill node 2.
    inst = make_instance(path_graph(3), [2], 1)
    out = sir_influence(inst, SirParams(alpha=1.0, runs=2, seed=4))
    assert out.values[0] == 3.0


def test_sir_outbreaks_within_bounds_and_deterministic():
    inst = make_instance(gnp_random_graph(12, 0.3, seed=6), [3], 2)
    p = SirParams(alpha=0.4, runs=50, seed=7)
    a = sir_influence(inst, p)
    b = sir_influence(inst, p)
    assert np.array_equal(a.values, b.values)
    assert np.all(a.values >= 1.0) and np.all(a.values <= 12.0)


def test_sir_max_steps_caps_rounds():
    inst = make_instance(path_graph(5), [], 4)
    episode = run_sir_episode(inst, 0, np.random.default_rng(0), alpha=1.0, max_steps=2)
    assert episode.rounds == 2 and episode.ever_infected == 3


def test_sir_unconstrained_matches_plain_model():
    # Large budget and no refills: outbreak-size law equals the standard
    # infect-once process (two-sample KS on a seeded run).
    g = gnp_random_graph(30, 0.12, seed=44)
    inst = make_instance(g, [], 30)
    runs = 10_000
    seed_node = 0
    ours = [
        run_sir_episode(inst, seed_node, np.random.default_rng([11, seed_node, ep]), 0.25).ever_infected
        for ep in range(runs)
    ]
    ref = plain_sir_outbreaks(g, seed_node, 0.25, runs, seed=1234)
    stat = scipy.stats.ks_2samp(ours, ref)
    assert stat.pvalue > 0.05


def test_hopping_single_particle_deterministic_transit():
    inst = make_instance(path_graph(3), [], 2)
    out = particle_hopping(
        inst,
        HoppingParams(policy="shortest-feasible", duration=3, injection_rate=1.0,
                      seed=5, pairs=((0, 2),), max_injections=1),
    )
    assert np.allclose(out.values, [1 / 3, 1 / 3, 1 / 3])
    assert out.meta["completed"] == 1


def test_hopping_policies_agree_when_moves_forced():
    inst = make_instance(path_graph(3), [], 2)
    kw = dict(duration=6, injection_rate=1.0, seed=8, pairs=((0, 2),), max_injections=2)
    a = particle_hopping(inst, HoppingParams(policy="shortest-feasible", **kw))
    b = particle_hopping(inst, HoppingParams(policy="random-feasible", **kw))
    assert np.allclose(a.values, b.values)


def test_hopping_infeasible_pair_skipped():
    inst = make_instance(path_graph(3), [], 1)
    out = particle_hopping(
        inst,
        HoppingParams(duration=5, injection_rate=1.0, seed=9, pairs=((0, 2),)),
    )
    assert np.all(out.values == 0.0)
    assert out.meta["infeasible_skipped"] == out.meta["requested"] == 5
    assert out.meta["placed"] == 0


def test_hopping_resamples_uniform_pairs():
    inst = make_instance(path_graph(4), [1, 2], 3)
    out = particle_hopping(inst, HoppingParams(duration=50, injection_rate=1.0, seed=10))
    assert out.meta["placed"] > 0
    assert out.meta["placed"] + out.meta["pending_at_end"] == out.meta["requested"]
    assert out.meta["completed"] + out.meta["in_flight_at_end"] == out.meta["placed"]


def test_hopping_occupancy_bounds_and_determinism():
    inst = make_instance(gnp_random_graph(12, 0.35, seed=13), [4, 7], 3)
    p = HoppingParams(duration=200, injection_rate=0.8, seed=14)
    a = particle_hopping(inst, p)
    b = particle_hopping(inst, p)
    assert np.array_equal(a.values, b.values)
    assert np.all(a.values >= 0.0) and np.all(a.values <= 1.0)
    assert a.meta["completed"] > 0


def test_hopping_blocked_injection_delays():
    # Two particles with the same source: the second waits for the cell.
    inst = make_instance(path_graph(4), [], 3)
    out = particle_hopping(
        inst,
        HoppingParams(duration=10, injection_rate=2.0, seed=15,
                      pairs=((0, 3),), max_injections=2),
    )
    assert out.meta["delayed_injection_steps"] >= 1
    assert out.meta["completed"] == 2


def test_hopping_head_on_traffic_resolves_via_alternate_route():
    # Opposing flows meeting head-on stall, then reroute along the other arc
    # of the cycle; traffic keeps completing instead of deadlocking.
    from chargecent.generators import cycle_graph

    inst = make_instance(cycle_graph(4), [], 4)
    out = particle_hopping(
        inst,
        HoppingParams(duration=400, injection_rate=0.5, seed=16,
                      pairs=((0, 2), (2, 0))),
    )
    assert out.meta["completed"] >= 10
    assert out.meta["completed"] + out.meta["in_flight_at_end"] == out.meta["placed"]


def test_hopping_param_validation():
    with pytest.raises(ValueError):
        HoppingParams(policy="warp")
    with pytest.raises(ValueError):
        HoppingParams(duration=0)
    with pytest.raises(ValueError):
        SirParams(alpha=1.5)
