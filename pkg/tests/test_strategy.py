from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecp import (
    ActivityGraph,
    CapacityError,
    InfeasibleTargetError,
    Policy,
    PortfolioSchedule,
    UnknownIdError,
    build_activity_graph,
    classify_targets,
    entry_probability,
    expected_completion,
    load_instance,
    optimal_policy,
    portfolio_split,
    proximity,
    simulate,
)
from ecp.strategy import DP_CAPACITY

from oracles import dp_expectation, greedy_expectation


@pytest.fixture(scope="module")
def w5(wheel5):
    g, active, policy, params = load_instance(wheel5)
    return g, active


@pytest.fixture(scope="module")
def w7(wheel7):
    g, active, policy, params = load_instance(wheel7)
    return g, active


# -- graphs and entry probabilities -------------------------------------------

def test_wheel_graph_shape(w5):
    g, active = w5
    assert g.degree("hub") == 5
    assert g.degree("s1") == 3
    assert active == frozenset({"s1"})


def test_build_activity_graph_from_proximity(nested_m):
    g = build_activity_graph(proximity(nested_m), 0.4)
    assert g.adjacency["p2"] == frozenset({"p1", "p3", "p4"})
    assert g.adjacency["p1"] == frozenset({"p2"})
    assert g.adjacency["p3"] == frozenset({"p2", "p4"})


def test_build_activity_graph_threshold_validation(nested_m):
    phi = proximity(nested_m)
    with pytest.raises(ValueError):
        build_activity_graph(phi, 0.0)
    with pytest.raises(ValueError):
        build_activity_graph(phi, 1.5)


def test_entry_probability_hub(w5):
    g, active = w5
    assert entry_probability(g, active, "hub") == pytest.approx(1 / 5)
    assert entry_probability(g, active, "s2") == pytest.approx(1 / 3)


def test_entry_probability_errors(w5):
    g, active = w5
    with pytest.raises(UnknownIdError):
        entry_probability(g, active, "nope")
    with pytest.raises(ValueError):
        entry_probability(g, active, "s1")


# -- exact policy values on the wheel -----------------------------------------

def _order(g, active, ids):
    return expected_completion(g, active, Policy("order", order=tuple(ids)))


def test_wheel5_ring_order(w5):
    g, active = w5
    ev = _order(g, active, ("s2", "s3", "s4", "s5", "hub"))
    assert ev.expected_time == pytest.approx(23 / 2)
    assert ev.method == "closed-form-order"


def test_wheel5_hub_first(w5):
    g, active = w5
    ev = _order(g, active, ("hub", "s2", "s3", "s4", "s5"))
    assert ev.expected_time == pytest.approx(21 / 2)


def test_wheel5_greedy_equals_optimal(w5):
    g, active = w5
    greedy = expected_completion(g, active, Policy("greedy"))
    opt = optimal_policy(g, active)
    assert greedy.expected_time == pytest.approx(19 / 2)
    assert opt.expected_time == pytest.approx(19 / 2)
    assert greedy.plan == opt.plan == ("s2", "hub", "s3", "s4", "s5")
    assert opt.method == "exact-dp"
    # an early hub bet beats pure ring-following, but it is not the best
    # very first move: relatedness maximization wins the opener here
    assert opt.plan[0] != "hub"


def test_wheel5_matches_fraction_oracles(w5, wheel5):
    g, active = w5
    edges = [tuple(e) for e in wheel5["edges"]]
    gexp, gplan = greedy_expectation(edges, set(active))
    ev = expected_completion(g, active, Policy("greedy"))
    assert ev.expected_time == pytest.approx(float(gexp), abs=1e-12)
    assert list(ev.plan) == gplan
    assert optimal_policy(g, active).expected_time == pytest.approx(
        float(dp_expectation(edges, set(active))), abs=1e-12)


def test_wheel7_greedy_strictly_worse(w7):
    g, active = w7
    greedy = expected_completion(g, active, Policy("greedy"))
    opt = optimal_policy(g, active)
    assert greedy.expected_time == pytest.approx(83 / 6)
    assert opt.expected_time == pytest.approx(27 / 2)
    assert greedy.expected_time > opt.expected_time + 0.3
    assert opt.plan[1] == "hub"  # optimal play banks the hub early


def test_lookahead_depths(w7):
    g, active = w7
    greedy = expected_completion(g, active, Policy("greedy"))
    la1 = expected_completion(g, active, Policy.parse("lookahead:1"))
    la2 = expected_completion(g, active, Policy.parse("lookahead:2"))
    assert la1.plan == greedy.plan
    assert la1.expected_time == pytest.approx(greedy.expected_time)
    assert la2.expected_time == pytest.approx(27 / 2)
    assert la1.policy == "lookahead:1" and la2.policy == "lookahead:2"


def test_optimal_table_navigation(w5):
    g, active = w5
    opt = optimal_policy(g, active)
    assert opt.table.value_for(active) == pytest.approx(19 / 2)
    assert opt.table.action_for(active) == "s2"
    assert opt.table.action_for(active | frozenset(opt.plan)) is None
    assert opt.table.value_for(active | frozenset(opt.plan)) == 0.0


def test_policy_parse_errors():
    with pytest.raises(ValueError):
        Policy.parse("sideways")
    with pytest.raises(ValueError):
        Policy.parse("lookahead:x")
    with pytest.raises(ValueError):
        Policy("lookahead", depth=0)
    with pytest.raises(ValueError):
        Policy("order", order=())


def test_order_policy_must_cover_inactive(w5):
    g, active = w5
    with pytest.raises(ValueError, match="cover exactly"):
        _order(g, active, ("s2", "s3", "s4", "s5"))  # hub missing
    with pytest.raises(ValueError, match="cover exactly"):
        _order(g, active, ("s2", "s3", "s4", "s5", "hub", "s1"))


def test_order_policy_infeasible_step(w5):
    g, active = w5
    with pytest.raises(InfeasibleTargetError):
        _order(g, active, ("s3", "s2", "s4", "s5", "hub"))  # s3 has no active neighbor


def test_isolated_nodes_pruned():
    g = ActivityGraph.from_edges(("a", "b", "c"), [("a", "b")])
    assert g.pruned == ("c",)
    assert "c" not in g.adjacency


def test_unreachable_component_rejected():
    g = ActivityGraph.from_edges(("a", "b", "c", "d"), [("a", "b"), ("c", "d")])
    with pytest.raises(InfeasibleTargetError, match="c"):
        expected_completion(g, frozenset({"a"}), Policy("greedy"))


def test_complete_start_is_zero(w5):
    g, _ = w5
    ev = expected_completion(g, frozenset(g.nodes), Policy("optimal"))
    assert ev.expected_time == 0.0 and ev.plan == ()


def test_dp_capacity_cap():
    n = DP_CAPACITY + 1
    nodes = ("seed",) + tuple(f"t{i:02d}" for i in range(n))
    edges = [("seed", t) for t in nodes[1:]]
    g = ActivityGraph.from_edges(nodes, edges)
    with pytest.raises(CapacityError):
        optimal_policy(g, frozenset({"seed"}))
    # greedy has no state table and handles the same instance fine
    ev = expected_completion(g, frozenset({"seed"}), Policy("greedy"))
    assert ev.expected_time == pytest.approx(n)  # every spoke enters at p=1


# -- seeded simulation --------------------------------------------------------

def test_simulate_bit_identical(w5):
    g, active = w5
    a = simulate(g, active, Policy("greedy"), trials=5000, seed=99)
    b = simulate(g, active, Policy("greedy"), trials=5000, seed=99)
    assert a.mc.mean == b.mc.mean
    assert a.mc.stderr == b.mc.stderr
    assert a.mc.activations_by_period.tobytes() == b.mc.activations_by_period.tobytes()
    c = simulate(g, active, Policy("greedy"), trials=5000, seed=100)
    assert c.mc.mean != a.mc.mean


def test_simulate_tracks_exact_value(w5):
    g, active = w5
    ev = simulate(g, active, Policy("greedy"), trials=20000, seed=7)
    assert abs(ev.mc.mean - ev.expected_time) < 5 * ev.mc.stderr
    assert ev.mc.ci_lo <= ev.mc.mean <= ev.mc.ci_hi
    assert ev.mc.activations_by_period.sum() == 20000 * len(ev.plan)


def test_simulate_needs_two_trials(w5):
    g, active = w5
    with pytest.raises(ValueError):
        simulate(g, active, Policy("greedy"), trials=1, seed=1)


def test_simulate_payload(w5):
    g, active = w5
    payload = simulate(g, active, Policy("greedy"), trials=100, seed=3).to_payload()
    assert payload["ci"]["trials"] == 100 and payload["ci"]["seed"] == 3
    assert payload["policy"] == "greedy"
    assert payload["tie_break"] == "lowest-id"


# -- target classification / portfolio ----------------------------------------

def test_classify_targets_bridging(w5):
    g, _ = w5
    active = frozenset({"s1", "s3"})
    om = {"hub": 0.9, "s2": 0.8, "s4": 0.3, "s5": 0.2}
    cls = classify_targets(g, active, om, related_threshold=0.5)
    bridging = {t.activity: t.bridging for t in cls.related + cls.unrelated}
    assert bridging == {"hub": 2, "s2": 2, "s4": 1, "s5": 1}
    assert [t.activity for t in cls.related] == ["hub", "s2"]
    assert [t.activity for t in cls.unrelated] == ["s4", "s5"]


def test_classify_targets_single_component(w5):
    g, _ = w5
    cls = classify_targets(g, frozenset({"s1", "s2"}),
                           {"hub": 0.5, "s3": 0.4, "s4": 0.1, "s5": 0.4}, 1.1)
    assert not cls.related  # threshold above every omega
    # s4 touches no active neighbor at all; everything else touches the one
    # component, and sorting is bridging-first then omega then id
    assert [(t.activity, t.bridging) for t in cls.unrelated] == [
        ("hub", 1), ("s3", 1), ("s5", 1), ("s4", 0)]


def test_portfolio_split_peak_and_width():
    s = portfolio_split(0.0)
    assert s.unrelated_share == pytest.approx(0.5)
    assert s.related_share == pytest.approx(0.5)
    for e in (1.0, -1.0):
        split = portfolio_split(e)
        assert split.unrelated_share == pytest.approx(0.30326533, abs=1e-8)
        assert split.related_share + split.unrelated_share == pytest.approx(1.0)


def test_portfolio_split_custom_schedule():
    sched = PortfolioSchedule(peak=1.0, width=2.0, max_unrelated=0.2)
    assert portfolio_split(1.0, sched).unrelated_share == pytest.approx(0.2)
    far = portfolio_split(9.0, sched)
    assert far.unrelated_share < 0.002
    assert far.to_payload()["schedule"] == {"peak": 1.0, "width": 2.0,
                                            "max_unrelated": 0.2}


def test_portfolio_schedule_validation():
    with pytest.raises(ValueError):
        PortfolioSchedule(width=0.0)
    with pytest.raises(ValueError):
        PortfolioSchedule(max_unrelated=1.5)


# -- instance loading ---------------------------------------------------------

def test_load_instance_roundtrip(wheel5):
    g, active, policy, params = load_instance(wheel5)
    assert policy == "greedy" and params == {}
    assert set(g.nodes) == set(wheel5["nodes"])


def test_load_instance_validation():
    base = {"nodes": ["a", "b"], "edges": [["a", "b"]], "active": ["a"]}
    for missing in ("nodes", "edges", "active"):
        broken = {k: v for k, v in base.items() if k != missing}
        with pytest.raises(ValueError, match=missing):
            load_instance(broken)
    with pytest.raises(UnknownIdError):
        load_instance({**base, "active": ["z"]})
    with pytest.raises(ValueError):
        load_instance({**base, "active": []})


# -- stochastic-instance property ---------------------------------------------

@st.composite
def small_instances(draw):
    n = draw(st.integers(3, 7))
    nodes = tuple(f"n{i}" for i in range(n))
    edges = {(nodes[i - 1], nodes[i]) for i in range(1, n)}  # spanning path
    extra = draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8))
    for i, j in extra:
        if i != j:
            edges.add((nodes[min(i, j)], nodes[max(i, j)]))
    return nodes, sorted(edges), {nodes[draw(st.integers(0, n - 1))]}


@given(small_instances())
@settings(max_examples=40)
def test_optimal_never_beaten_and_matches_oracle(instance):
    nodes, edges, active = instance
    g = ActivityGraph.from_edges(nodes, edges)
    greedy = expected_completion(g, frozenset(active), Policy("greedy"))
    opt = optimal_policy(g, frozenset(active))
    assert opt.expected_time <= greedy.expected_time + 1e-9
    gexp, gplan = greedy_expectation(edges, set(active))
    assert greedy.expected_time == pytest.approx(float(gexp), abs=1e-9)
    assert list(greedy.plan) == gplan
    assert opt.expected_time == pytest.approx(
        float(dp_expectation(edges, set(active))), abs=1e-9)
