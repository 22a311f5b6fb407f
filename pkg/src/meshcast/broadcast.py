"""Local-broadcast planning with a per-neighbor probabilistic delivery guarantee.

Three planners, dispatched by strategy: a common-channel repeat planner, a
greedy channel-cover planner for static pseudo-random assignments, and a
greedy (timeslot, interface) planner for dynamic assignments. All plans are
verified against :func:`coverage_probability`, the exact analytic oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cia import (
    InterfaceAssignment,
    Strategy,
    channels_at,
    mc_neighbors,
    neighborhood_hyperperiod,
)
from .errors import ConfigurationError, PlanIntegrityError, UncoverableError
from .topology import Topology


@dataclass(frozen=True)
class Transmission:
    """One broadcast copy: interface, channel and when it is sent.

    ``slot`` is a (t_start, t_stop) tick interval for slotted (dynamic)
    plans, or None for static-style plans where the copy can be sent at any
    time within the period.
    """

    sender: int
    interface: int
    channel: int
    slot: tuple[int, int] | None = None


@dataclass(frozen=True)
class BroadcastPlan:
    sender: int
    transmissions: tuple[Transmission, ...]

    def __len__(self) -> int:
        return len(self.transmissions)


@dataclass
class CoverageState:
    """Per-neighbor probability of having received at least one copy."""

    pcover: dict[int, float]

    def min_cover(self) -> float:
        return min(self.pcover.values()) if self.pcover else 1.0


def copies_required(p_deliv: float, p_cover_min: float) -> int:
    """Minimal number of independent copies reaching coverage >= p_cover_min."""
    if not (0.0 <= p_deliv <= 1.0):
        raise ValueError(f"p_deliv must be in [0,1], got {p_deliv}")
    if not (0.0 < p_cover_min < 1.0):
        raise ValueError(f"p_cover_min must be in (0,1), got {p_cover_min}")
    if p_deliv == 0.0:
        raise UncoverableError("p_deliv = 0: no number of copies reaches the threshold")
    if p_deliv == 1.0:
        return 1
    k = max(1, math.ceil(math.log(1.0 - p_cover_min) / math.log(1.0 - p_deliv)))
    # the log form can be off by one at float boundaries; settle it with the
    # defining inequality 1 - (1-p)^k >= p_cover_min
    while 1.0 - (1.0 - p_deliv) ** k < p_cover_min:
        k += 1
    while k > 1 and 1.0 - (1.0 - p_deliv) ** (k - 1) >= p_cover_min:
        k -= 1
    return k


def update_pcover(current: float, p_deliv: float) -> float:
    """Coverage after one more independent copy with delivery probability p_deliv."""
    if not (0.0 <= current <= 1.0 and 0.0 <= p_deliv <= 1.0):
        raise ValueError(f"probabilities must be in [0,1], got {current}, {p_deliv}")
    return 1.0 - (1.0 - current) * (1.0 - p_deliv)


def _check_transmission(tx: Transmission, assignment: InterfaceAssignment) -> None:
    ifaces = assignment.node_interfaces(tx.sender)
    if not (0 <= tx.interface < len(ifaces)):
        raise PlanIntegrityError(f"sender {tx.sender} has no interface {tx.interface}")
    iface = ifaces[tx.interface]
    if tx.slot is None:
        # whole-period copy: a static interface must already sit on the
        # channel; a dynamic interface tunes on demand for transmission
        if iface.kind == "static" and iface.schedule.channel_at(0) != tx.channel:
            raise PlanIntegrityError(
                f"static interface {tx.interface} of node {tx.sender} is not on channel {tx.channel}"
            )
    else:
        a, b = tx.slot
        if iface.schedule.constant_channel(a, b) != tx.channel:
            raise PlanIntegrityError(
                f"interface {tx.interface} of node {tx.sender} is not on channel "
                f"{tx.channel} throughout [{a},{b})"
            )


def _receives(tx: Transmission, receiver: int, assignment: InterfaceAssignment) -> bool:
    if tx.slot is None:
        return tx.channel in assignment.static_channels(receiver)
    a, b = tx.slot
    return any(
        iface.schedule.constant_channel(a, b) == tx.channel
        for iface in assignment.node_interfaces(receiver)
    )


def coverage_probability(
    plan: BroadcastPlan,
    topo: Topology,
    assignment: InterfaceAssignment,
    neighbors: set[int] | None = None,
) -> CoverageState:
    """Exact coverage probability of every multi-channel neighbor under the plan.

    Copies are assumed independent; each neighbor's coverage is
    1 - prod(1 - p_deliv) over the copies it can receive.
    """
    if neighbors is None:
        neighbors = mc_neighbors(topo, assignment, plan.sender)
    pcover = {v: 0.0 for v in neighbors}
    for tx in plan.transmissions:
        _check_transmission(tx, assignment)
        for v in neighbors:
            if _receives(tx, v, assignment):
                pcover[v] = update_pcover(pcover[v], topo.p_deliv(plan.sender, v))
    return CoverageState(pcover=pcover)


def plan_common_channel(
    sender: int,
    topo: Topology,
    assignment: InterfaceAssignment,
    p_cover_min: float,
    neighbors: set[int] | None = None,
) -> BroadcastPlan:
    """Repeat the copy the weakest link requires on the common channel set.

    StaticCommon spreads the copies round-robin over the sender's
    interfaces; MixedCommonAdaptive concentrates them on the control
    channel 0.
    """
    if assignment.strategy not in (Strategy.StaticCommon, Strategy.MixedCommonAdaptive):
        raise ConfigurationError(
            f"plan_common_channel does not apply to {assignment.strategy.value}"
        )
    if neighbors is None:
        neighbors = mc_neighbors(topo, assignment, sender)
    if not neighbors:
        return BroadcastPlan(sender=sender, transmissions=())
    k = max(copies_required(topo.p_deliv(sender, v), p_cover_min) for v in neighbors)
    txs = []
    if assignment.strategy is Strategy.StaticCommon:
        n_if = assignment.n_interfaces
        start = sender % n_if
        for j in range(k):
            iface = (start + j) % n_if
            txs.append(Transmission(sender=sender, interface=iface, channel=iface))
    else:
        for _ in range(k):
            txs.append(Transmission(sender=sender, interface=0, channel=0))
    return BroadcastPlan(sender=sender, transmissions=tuple(txs))


def _listen_channels(
    sender: int, assignment: InterfaceAssignment, neighbors: set[int]
) -> dict[int, set[int]]:
    """Channels on which each neighbor can receive a static-style copy from sender."""
    if assignment.strategy is Strategy.StaticPseudoRandom:
        own = set(assignment.static_channels(sender))
        return {v: set(assignment.static_channels(v)) & own for v in neighbors}
    # MixedPseudoRandomAdaptive: dynamic interfaces transmit on any channel,
    # neighbors receive on their static interface
    return {v: set(assignment.static_channels(v)) for v in neighbors}


def plan_greedy_static(
    sender: int,
    topo: Topology,
    assignment: InterfaceAssignment,
    p_cover_min: float,
    rng: np.random.Generator,
    neighbors: set[int] | None = None,
) -> BroadcastPlan:
    """Greedy channel cover for pseudo-random static receive channels.

    Repeatedly sends on one of the channels reaching the most
    still-uncovered neighbors (ties broken uniformly at random) until every
    neighbor's accumulated coverage meets the threshold.
    """
    if assignment.strategy not in (
        Strategy.StaticPseudoRandom,
        Strategy.MixedPseudoRandomAdaptive,
    ):
        raise ConfigurationError(
            f"plan_greedy_static does not apply to {assignment.strategy.value}"
        )
    if neighbors is None:
        neighbors = mc_neighbors(topo, assignment, sender)
    listen = _listen_channels(sender, assignment, neighbors)
    pdeliv = {v: topo.p_deliv(sender, v) for v in neighbors}
    budget = sum(copies_required(p, p_cover_min) for p in pdeliv.values())

    if assignment.strategy is Strategy.StaticPseudoRandom:
        own = list(assignment.static_channels(sender))
        tx_iface = {c: own.index(c) for c in own}
    else:
        dyn = assignment.dynamic_indices(sender)[0]
        tx_iface = None  # any channel via the first dynamic interface

    pcover = {v: 0.0 for v in neighbors}
    txs: list[Transmission] = []
    while True:
        under = [v for v in sorted(neighbors) if pcover[v] < p_cover_min]
        if not under:
            break
        counts: dict[int, int] = {}
        for v in under:
            for c in listen[v]:
                counts[c] = counts.get(c, 0) + 1
        if not counts:
            raise UncoverableError(
                f"node {sender}: neighbors {under} share no usable channel"
            )
        best = max(counts.values())
        candidates = sorted(c for c, n in counts.items() if n == best)
        channel = candidates[int(rng.integers(len(candidates)))]
        iface = tx_iface[channel] if tx_iface is not None else dyn
        txs.append(Transmission(sender=sender, interface=iface, channel=channel))
        for v in neighbors:
            if channel in listen[v]:
                pcover[v] = update_pcover(pcover[v], pdeliv[v])
        if len(txs) > budget:
            raise UncoverableError(f"node {sender}: greedy cover exceeded its budget")
    return BroadcastPlan(sender=sender, transmissions=tuple(txs))


def plan_greedy_dynamic(
    sender: int,
    topo: Topology,
    assignment: InterfaceAssignment,
    p_cover_min: float,
    rng: np.random.Generator,
    horizon: int | None = None,
    neighbors: set[int] | None = None,
) -> BroadcastPlan:
    """Greedy (timeslot, interface) selection for fully dynamic assignments.

    Slot boundaries are the union of the neighborhood's channel switching
    instants over one hyperperiod; a pair may be selected repeatedly when
    several copies are needed.
    """
    if assignment.strategy is not Strategy.DynamicAdaptive:
        raise ConfigurationError(
            f"plan_greedy_dynamic does not apply to {assignment.strategy.value}"
        )
    if neighbors is None:
        neighbors = mc_neighbors(topo, assignment, sender)
    if not neighbors:
        return BroadcastPlan(sender=sender, transmissions=())
    nbrs = sorted(neighbors)
    nodes = [sender] + nbrs
    hyper = neighborhood_hyperperiod(assignment, nodes)
    if horizon is None:
        horizon = hyper
    elif horizon < hyper:
        raise ValueError(f"horizon {horizon} shorter than the neighborhood hyperperiod {hyper}")
    boundaries = {0, horizon}
    for u in nodes:
        for iface in assignment.node_interfaces(u):
            boundaries.update(iface.schedule.switching_instants(horizon))
    cuts = sorted(boundaries)
    starts = np.asarray(cuts[:-1], dtype=np.int64)
    stops = np.asarray(cuts[1:], dtype=np.int64)

    ch_sender = np.stack(
        [channels_at(iface.schedule, starts) for iface in assignment.node_interfaces(sender)]
    )  # (I, S)
    # receivable[n, i, s]: neighbor n hears sender interface i during slot s
    # (neighbors may have differing interface counts, so stack per neighbor)
    receivable = np.stack(
        [
            (
                np.stack(
                    [channels_at(i.schedule, starts) for i in assignment.node_interfaces(u)]
                )[:, None, :]
                == ch_sender[None, :, :]
            ).any(axis=0)
            for u in nbrs
        ]
    )  # (N, I, S)

    pdeliv = np.asarray([topo.p_deliv(sender, v) for v in nbrs])
    budget = sum(copies_required(float(p), p_cover_min) for p in pdeliv)
    pcover = np.zeros(len(nbrs))
    txs: list[Transmission] = []
    while True:
        under = pcover < p_cover_min
        if not under.any():
            break
        counts = receivable[under].sum(axis=0)  # (I, S)
        best = int(counts.max())
        if best == 0:
            missing = [nbrs[i] for i in np.flatnonzero(under)]
            raise UncoverableError(
                f"node {sender}: neighbors {missing} unreachable in any timeslot"
            )
        cand = np.argwhere(counts == best)
        i, s = cand[int(rng.integers(len(cand)))]
        txs.append(
            Transmission(
                sender=sender,
                interface=int(i),
                channel=int(ch_sender[i, s]),
                slot=(int(starts[s]), int(stops[s])),
            )
        )
        hit = receivable[:, i, s]
        pcover[hit] = 1.0 - (1.0 - pcover[hit]) * (1.0 - pdeliv[hit])
        if len(txs) > budget:
            raise UncoverableError(f"node {sender}: greedy cover exceeded its budget")
    return BroadcastPlan(sender=sender, transmissions=tuple(txs))


def plan_broadcast(
    sender: int,
    topo: Topology,
    assignment: InterfaceAssignment,
    strategy: Strategy,
    p_cover_min: float,
    rng: np.random.Generator,
    neighbors: set[int] | None = None,
) -> BroadcastPlan:
    """Dispatch to the planner matching the strategy."""
    if strategy is not assignment.strategy:
        raise ConfigurationError(
            f"assignment was built for {assignment.strategy.value}, not {strategy.value}"
        )
    if strategy in (Strategy.StaticCommon, Strategy.MixedCommonAdaptive):
        return plan_common_channel(sender, topo, assignment, p_cover_min, neighbors=neighbors)
    if strategy in (Strategy.StaticPseudoRandom, Strategy.MixedPseudoRandomAdaptive):
        return plan_greedy_static(
            sender, topo, assignment, p_cover_min, rng, neighbors=neighbors
        )
    return plan_greedy_dynamic(
        sender, topo, assignment, p_cover_min, rng, neighbors=neighbors
    )


def dump_plan_csv(plans: list[BroadcastPlan]) -> list[str]:
    """Debug dump: one CSV row per transmission."""
    rows = ["sender,tx_index,interface,channel,slot_start,slot_stop"]
    for plan in plans:
        for j, tx in enumerate(plan.transmissions):
            a, b = tx.slot if tx.slot is not None else ("", "")
            rows.append(f"{plan.sender},{j},{tx.interface},{tx.channel},{a},{b}")
    return rows
