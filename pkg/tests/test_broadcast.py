import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_topology
from meshcast.broadcast import (
    BroadcastPlan,
    Transmission,
    _receives,
    copies_required,
    coverage_probability,
    plan_broadcast,
    plan_common_channel,
    plan_greedy_dynamic,
    plan_greedy_static,
    update_pcover,
)
from meshcast.cia import (
    Interface,
    InterfaceAssignment,
    Schedule,
    Strategy,
    assign_mixed_common_adaptive,
    assign_static_common,
    build_assignment,
    mc_adjacency,
    static_schedule,
)
from meshcast.errors import ConfigurationError, PlanIntegrityError, UncoverableError
from meshcast.topology import PerModel, generate_topology

probs = st.floats(min_value=0.01, max_value=1.0)


class TestCopiesRequired:
    def test_perfect_link(self):
        assert copies_required(1.0, 0.95) == 1

    def test_half_link(self):
        # smallest k with 1 - 0.5^k >= 0.95 is 5
        assert copies_required(0.5, 0.95) == 5

    def test_boundary_single_copy(self):
        assert copies_required(0.5, 0.5) == 1

    def test_zero_p_deliv_uncoverable(self):
        with pytest.raises(UncoverableError):
            copies_required(0.0, 0.95)

    def test_invalid_threshold(self):
        with pytest.raises(ValueError):
            copies_required(0.5, 1.0)

    @given(p=probs, pcm=st.floats(min_value=0.01, max_value=0.99))
    def test_matches_incremental_oracle(self, p, pcm):
        k = copies_required(p, pcm)
        assert 1.0 - (1.0 - p) ** k >= pcm
        assert k == 1 or 1.0 - (1.0 - p) ** (k - 1) < pcm

    @given(p1=probs, p2=probs, pcm=st.floats(min_value=0.01, max_value=0.99))
    def test_non_increasing_in_p_deliv(self, p1, p2, pcm):
        lo, hi = sorted((p1, p2))
        assert copies_required(lo, pcm) >= copies_required(hi, pcm)

    @given(p=probs, c1=st.floats(min_value=0.01, max_value=0.99),
           c2=st.floats(min_value=0.01, max_value=0.99))
    def test_non_decreasing_in_threshold(self, p, c1, c2):
        lo, hi = sorted((c1, c2))
        assert copies_required(p, lo) <= copies_required(p, hi)


class TestUpdatePcover:
    def test_first_copy(self):
        assert update_pcover(0.0, 0.7) == 0.7

    def test_useless_copy(self):
        assert update_pcover(0.9, 0.0) == 0.9

    def test_two_half_copies(self):
        assert update_pcover(0.5, 0.5) == 0.75

    @given(c=st.floats(min_value=0, max_value=1), p=st.floats(min_value=0, max_value=1))
    def test_never_decreases(self, c, p):
        assert update_pcover(c, p) >= max(c, p) - 1e-15

    @given(ps=st.lists(st.floats(min_value=0, max_value=1), min_size=1, max_size=6))
    def test_order_independent(self, ps):
        results = set()
        expected = 1.0 - math.prod(1.0 - p for p in ps)
        for perm in itertools.permutations(ps):
            acc = 0.0
            for p in perm:
                acc = update_pcover(acc, p)
            results.add(acc)
            assert abs(acc - expected) < 1e-12
        assert max(results) - min(results) < 1e-12


@pytest.fixture(scope="module")
def common_setup():
    topo = make_topology(3, {(0, 1): 1.0, (0, 2): 0.5})
    assignment = assign_static_common(topo, 3, 12)
    return topo, assignment


class TestCoverageProbability:
    def test_empty_plan(self, common_setup):
        topo, a = common_setup
        state = coverage_probability(BroadcastPlan(sender=0, transmissions=()), topo, a)
        assert state.pcover == {1: 0.0, 2: 0.0}

    def test_k_copies_formula(self, common_setup):
        topo, a = common_setup
        k = 4
        plan = BroadcastPlan(
            sender=0,
            transmissions=tuple(Transmission(sender=0, interface=0, channel=0) for _ in range(k)),
        )
        state = coverage_probability(plan, topo, a)
        assert state.pcover[1] == 1.0
        assert state.pcover[2] == pytest.approx(1.0 - 0.5**k, abs=1e-12)

    def test_inconsistent_transmission_rejected(self, common_setup):
        topo, a = common_setup
        plan = BroadcastPlan(
            sender=0, transmissions=(Transmission(sender=0, interface=0, channel=5),)
        )
        with pytest.raises(PlanIntegrityError):
            coverage_probability(plan, topo, a)

    def test_matches_monte_carlo(self, common_setup):
        topo, a = common_setup
        rng = np.random.default_rng(77)
        trials = 100_000
        plan = plan_common_channel(0, topo, a, 0.95)
        state = coverage_probability(plan, topo, a)
        for v, analytic in state.pcover.items():
            txs = [tx for tx in plan.transmissions if _receives(tx, v, a)]
            p = topo.p_deliv(0, v)
            hits = (rng.random((trials, len(txs))) < p).any(axis=1)
            estimate = hits.mean()
            se = math.sqrt(max(analytic * (1 - analytic), 1e-12) / trials)
            assert abs(estimate - analytic) <= 3 * se + 1e-9


class TestPlanCommonChannel:
    def test_perfect_links_single_copy(self):
        topo = make_topology(3, {(0, 1): 1.0, (0, 2): 1.0})
        a = assign_static_common(topo, 3, 12)
        assert len(plan_common_channel(0, topo, a, 0.95)) == 1

    def test_weakest_link_drives_count(self, common_setup):
        topo, a = common_setup
        plan = plan_common_channel(0, topo, a, 0.95)
        assert len(plan) == 5

    def test_no_shorter_plan_covers(self, common_setup):
        # optimality: the K-1 prefix leaves the weakest neighbor uncovered
        topo, a = common_setup
        plan = plan_common_channel(0, topo, a, 0.95)
        truncated = BroadcastPlan(sender=0, transmissions=plan.transmissions[:-1])
        state = coverage_probability(truncated, topo, a)
        assert state.min_cover() < 0.95

    def test_round_robin_spreads_interfaces(self, common_setup):
        topo, a = common_setup
        plan = plan_common_channel(0, topo, a, 0.95)
        channels = [tx.channel for tx in plan.transmissions]
        assert set(channels) == {0, 1, 2}

    def test_mixed_common_concentrates_on_control(self):
        topo = make_topology(3, {(0, 1): 1.0, (0, 2): 0.5})
        a = assign_mixed_common_adaptive(topo, 3, 12, 100, seed=1)
        plan = plan_common_channel(0, topo, a, 0.95)
        assert len(plan) == 5
        assert all(tx.channel == 0 for tx in plan.transmissions)

    def test_isolated_sender_empty_plan(self):
        topo = make_topology(3, {(1, 2): 1.0})
        a = assign_static_common(topo, 3, 12)
        assert len(plan_common_channel(0, topo, a, 0.95)) == 0

    def test_wrong_strategy_rejected(self):
        topo = make_topology(2, {(0, 1): 1.0})
        a = build_assignment(Strategy.DynamicAdaptive, topo, 3, 12, 100, 1)
        with pytest.raises(ConfigurationError):
            plan_common_channel(0, topo, a, 0.95)


def mpra_assignment(static_chans, n_channels=4, slot_len=10):
    """Hand-built MixedPseudoRandomAdaptive-style assignment: node i receives
    statically on static_chans[i] and transmits through one dynamic interface."""
    nodes = []
    for ch in static_chans:
        pool = [c for c in range(n_channels) if c != ch]
        entries = tuple((c, k * slot_len, (k + 1) * slot_len) for k, c in enumerate(pool))
        nodes.append(
            (
                Interface("static", static_schedule(ch)),
                Interface("dynamic", Schedule(entries=entries, period=slot_len * len(pool))),
            )
        )
    return InterfaceAssignment(
        strategy=Strategy.MixedPseudoRandomAdaptive,
        interfaces=tuple(nodes),
        n_channels=n_channels,
        slot_len=slot_len,
        seed=0,
    )


class TestPlanGreedyStatic:
    def test_single_channel_single_copy(self):
        topo = make_topology(3, {(0, 1): 1.0, (0, 2): 1.0})
        a = mpra_assignment([0, 1, 1])
        rng = np.random.default_rng(1)
        plan = plan_greedy_static(0, topo, a, 0.95, rng, neighbors={1, 2})
        assert len(plan) == 1
        assert plan.transmissions[0].channel == 1

    def test_two_channel_cover(self):
        # neighbors listen on {1, 1, 2}; two transmissions suffice and are minimal
        topo = make_topology(4, {(0, 1): 1.0, (0, 2): 1.0, (0, 3): 1.0})
        a = mpra_assignment([0, 1, 1, 2])
        rng = np.random.default_rng(1)
        plan = plan_greedy_static(0, topo, a, 0.95, rng, neighbors={1, 2, 3})
        assert len(plan) == 2
        assert [tx.channel for tx in plan.transmissions] == [1, 2]
        # exhaustive check: no single-transmission plan covers all three
        for ch in range(4):
            state = coverage_probability(
                BroadcastPlan(sender=0, transmissions=(Transmission(0, 1, ch),)),
                topo,
                a,
                neighbors={1, 2, 3},
            )
            assert state.min_cover() < 0.95

    def test_lossy_links_repeat_channels(self):
        topo = make_topology(3, {(0, 1): 0.5, (0, 2): 0.5})
        a = mpra_assignment([0, 1, 2])
        rng = np.random.default_rng(1)
        plan = plan_greedy_static(0, topo, a, 0.95, rng, neighbors={1, 2})
        state = coverage_probability(plan, topo, a, neighbors={1, 2})
        assert state.min_cover() >= 0.95
        assert len(plan) == 10  # 5 copies per neighbor on its own channel

    def test_static_pseudorandom_uses_shared_channels_only(self):
        topo = make_topology(4, {(0, 1): 1.0, (0, 2): 1.0, (0, 3): 1.0})
        nodes = [
            (Interface("static", static_schedule(1)), Interface("static", static_schedule(2))),
            (Interface("static", static_schedule(1)), Interface("static", static_schedule(0))),
            (Interface("static", static_schedule(1)), Interface("static", static_schedule(3))),
            (Interface("static", static_schedule(2)), Interface("static", static_schedule(3))),
        ]
        a = InterfaceAssignment(
            strategy=Strategy.StaticPseudoRandom,
            interfaces=tuple(nodes),
            n_channels=4,
            slot_len=1,
            seed=0,
        )
        rng = np.random.default_rng(1)
        plan = plan_greedy_static(0, topo, a, 0.95, rng, neighbors={1, 2, 3})
        assert [tx.channel for tx in plan.transmissions] == [1, 2]
        # the transmitting interface is the sender's own static interface
        assert [tx.interface for tx in plan.transmissions] == [0, 1]

    def test_budget_upper_bound_and_oracle_on_random_instances(self):
        for seed in range(10):
            topo = generate_topology(25, 5, PerModel(), 0.5, seed=seed)
            a = build_assignment(Strategy.StaticPseudoRandom, topo, 3, 12, 100, seed)
            adj = mc_adjacency(topo, a)
            rng = np.random.default_rng(seed)
            for v in range(topo.n_nodes):
                plan = plan_greedy_static(v, topo, a, 0.95, rng, neighbors=adj[v])
                state = coverage_probability(plan, topo, a, neighbors=adj[v])
                assert state.min_cover() >= 0.95 or not adj[v]
                bound = sum(copies_required(topo.p_deliv(v, u), 0.95) for u in adj[v])
                assert len(plan) <= bound

    def test_deterministic_for_fixed_rng(self):
        topo = generate_topology(25, 5, PerModel(), 0.5, seed=4)
        a = build_assignment(Strategy.StaticPseudoRandom, topo, 3, 12, 100, 4)
        p1 = plan_greedy_static(3, topo, a, 0.95, np.random.default_rng(9))
        p2 = plan_greedy_static(3, topo, a, 0.95, np.random.default_rng(9))
        assert p1 == p2


def figure_scenario():
    """Neighborhood shaped like the mixed-interface example: the sender can
    reach two neighbors in one slot through one interface and the third
    through another interface."""
    topo = make_topology(4, {(0, 1): 1.0, (0, 2): 1.0, (0, 3): 1.0})
    half = lambda c1, c2: Schedule(entries=((c1, 0, 20), (c2, 20, 40)), period=40)
    nodes = (
        (  # sender: three interfaces
            Interface("dynamic", half(2, 1)),
            Interface("dynamic", Schedule(entries=((0, 0, 40),), period=40)),
            Interface("dynamic", half(1, 3)),
        ),
        (Interface("dynamic", Schedule(entries=((1, 0, 40),), period=40)),),  # v2
        (Interface("dynamic", half(2, 3)),),  # v3
        (  # v4: two interfaces
            Interface("dynamic", Schedule(entries=((0, 0, 40),), period=40)),
            Interface("dynamic", half(2, 1)),
        ),
    )
    a = InterfaceAssignment(
        strategy=Strategy.DynamicAdaptive,
        interfaces=nodes,
        n_channels=4,
        slot_len=20,
        seed=0,
    )
    return topo, a


class TestPlanGreedyDynamic:
    def test_figure_scenario_two_transmissions(self):
        topo, a = figure_scenario()
        rng = np.random.default_rng(0)
        plan = plan_greedy_dynamic(0, topo, a, 0.95, rng, neighbors={1, 2, 3})
        assert len(plan) == 2
        state = coverage_probability(plan, topo, a, neighbors={1, 2, 3})
        assert state.min_cover() >= 0.95
        # the first greedy pick reaches two neighbors at once, and no single
        # transmission can reach all three
        first = BroadcastPlan(sender=0, transmissions=plan.transmissions[:1])
        covered = coverage_probability(first, topo, a, neighbors={1, 2, 3}).pcover
        assert sum(1 for p in covered.values() if p >= 0.95) == 2
        for iface in range(3):
            sched = a.interfaces[0][iface].schedule
            for ch, start, stop in sched.segments(0, sched.period):
                tx = Transmission(0, iface, ch, slot=(start, stop))
                single = BroadcastPlan(sender=0, transmissions=(tx,))
                state = coverage_probability(single, topo, a, neighbors={1, 2, 3})
                assert state.min_cover() < 0.95

    def test_single_neighbor_single_shared_slot(self):
        topo = make_topology(2, {(0, 1): 0.5})
        nodes = (
            (Interface("dynamic", Schedule(entries=((0, 0, 10), (1, 10, 20)), period=20)),),
            (Interface("dynamic", Schedule(entries=((0, 0, 10), (3, 10, 20)), period=20)),),
        )
        a = InterfaceAssignment(
            strategy=Strategy.DynamicAdaptive,
            interfaces=nodes,
            n_channels=4,
            slot_len=10,
            seed=0,
        )
        rng = np.random.default_rng(0)
        plan = plan_greedy_dynamic(0, topo, a, 0.95, rng, neighbors={1})
        assert len(plan) == 5  # matches copies_required(0.5, 0.95)
        assert all(tx.slot == (0, 10) and tx.channel == 0 for tx in plan.transmissions)

    def test_oracle_on_random_instances(self):
        for seed in range(5):
            topo = generate_topology(25, 5, PerModel(), 0.5, seed=seed)
            a = build_assignment(Strategy.DynamicAdaptive, topo, 3, 12, 100, seed)
            adj = mc_adjacency(topo, a)
            rng = np.random.default_rng(seed)
            for v in range(topo.n_nodes):
                plan = plan_greedy_dynamic(v, topo, a, 0.95, rng, neighbors=adj[v])
                state = coverage_probability(plan, topo, a, neighbors=adj[v])
                assert state.min_cover() >= 0.95 or not adj[v]

    def test_wrong_strategy_rejected(self):
        topo = make_topology(2, {(0, 1): 1.0})
        a = assign_static_common(topo, 2, 4)
        with pytest.raises(ConfigurationError):
            plan_greedy_dynamic(0, topo, a, 0.95, np.random.default_rng(0))


class TestPlanBroadcast:
    def test_dispatch_and_coverage_all_strategies(self):
        topo = generate_topology(20, 5, PerModel(), 0.5, seed=2)
        for strategy in Strategy:
            a = build_assignment(strategy, topo, 3, 12, 100, 2)
            adj = mc_adjacency(topo, a)
            rng = np.random.default_rng(2)
            for v in range(topo.n_nodes):
                plan = plan_broadcast(v, topo, a, strategy, 0.95, rng, neighbors=adj[v])
                if strategy in (Strategy.StaticCommon, Strategy.MixedCommonAdaptive):
                    assert all(tx.slot is None for tx in plan.transmissions)
                if strategy is Strategy.DynamicAdaptive:
                    assert all(tx.slot is not None for tx in plan.transmissions)
                if strategy is Strategy.MixedCommonAdaptive:
                    assert all(tx.channel == 0 for tx in plan.transmissions)
                state = coverage_probability(plan, topo, a, neighbors=adj[v])
                assert state.min_cover() >= 0.95 or not adj[v]

    def test_strategy_mismatch_rejected(self):
        topo = make_topology(2, {(0, 1): 1.0})
        a = assign_static_common(topo, 2, 4)
        with pytest.raises(ConfigurationError):
            plan_broadcast(0, topo, a, Strategy.DynamicAdaptive, 0.95, np.random.default_rng(0))
