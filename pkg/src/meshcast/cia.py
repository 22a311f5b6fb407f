"""Interface schedules and the five Channel-and-Interface-Assignment strategies.

Time is discrete (integer ticks). A static interface holds one channel
forever (modelled as a period-1 schedule); a dynamic interface cycles
through a seeded permutation of its channel pool, one ``slot_len``-tick
slot per channel, with a per-node phase offset so nodes do not switch
synchronously.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError
from .seeding import mix
from .topology import Topology

# stream tags keeping the seeded draws for permutations, phases and
# static channels independent of each other
_TAG_PERM = 1
_TAG_PHASE = 2
_TAG_CHANNEL = 3


class Strategy(str, Enum):
    """The five CIA strategies."""

    StaticCommon = "StaticCommon"
    StaticPseudoRandom = "StaticPseudoRandom"
    DynamicAdaptive = "DynamicAdaptive"
    MixedCommonAdaptive = "MixedCommonAdaptive"
    MixedPseudoRandomAdaptive = "MixedPseudoRandomAdaptive"


@dataclass(frozen=True)
class Schedule:
    """Channel-over-time plan of one interface.

    ``entries`` is an ordered tuple of (channel, t_start, t_stop) tiling
    [0, period) exactly: no gaps, no overlaps.
    """

    entries: tuple[tuple[int, int, int], ...]
    period: int

    def __post_init__(self) -> None:
        if self.period <= 0:
            raise ConfigurationError(f"schedule period must be positive, got {self.period}")
        if not self.entries:
            raise ConfigurationError("schedule must have at least one entry")
        t = 0
        for ch, start, stop in self.entries:
            if start != t or stop <= start:
                raise ConfigurationError(f"schedule entries do not tile the period: {self.entries}")
            t = stop
        if t != self.period:
            raise ConfigurationError(
                f"schedule entries stop at {t}, expected period {self.period}"
            )

    def channel_at(self, t: int) -> int:
        """Channel the interface is tuned to at tick ``t``."""
        t %= self.period
        for ch, start, stop in self.entries:
            if start <= t < stop:
                return ch
        raise AssertionError("unreachable: entries tile the period")

    def channels(self) -> set[int]:
        return {ch for ch, _, _ in self.entries}

    def is_constant(self) -> bool:
        return len(self.entries) == 1

    def segments(self, t0: int, t1: int):
        """Yield (channel, start, stop) pieces covering [t0, t1), unrolling periods."""
        k = t0 // self.period
        while k * self.period < t1:
            base = k * self.period
            for ch, start, stop in self.entries:
                a, b = base + start, base + stop
                if b <= t0:
                    continue
                if a >= t1:
                    break
                yield ch, max(a, t0), min(b, t1)
            k += 1

    def constant_channel(self, t0: int, t1: int) -> int | None:
        """The single channel held throughout [t0, t1), or None if it switches."""
        chans = {ch for ch, _, _ in self.segments(t0, t1)}
        if len(chans) == 1:
            return chans.pop()
        return None

    def switching_instants(self, horizon: int) -> list[int]:
        """Ticks in [0, horizon) at which the channel may change."""
        if self.is_constant():
            return []
        out = []
        for k in range(0, -(-horizon // self.period)):
            for _, start, _ in self.entries:
                t = k * self.period + start
                if t < horizon:
                    out.append(t)
        return out


def static_schedule(channel: int) -> Schedule:
    return Schedule(entries=((channel, 0, 1),), period=1)


def _offset_entries(perm: list[int], slot_len: int, offset: int) -> Schedule:
    """Periodic schedule visiting ``perm`` one slot each, phase-shifted by ``offset`` ticks."""
    n = len(perm)
    period = n * slot_len
    if offset == 0:
        entries = tuple((perm[k], k * slot_len, (k + 1) * slot_len) for k in range(n))
    else:
        parts = [(perm[-1], 0, offset)]
        for k in range(n - 1):
            parts.append((perm[k], offset + k * slot_len, offset + (k + 1) * slot_len))
        parts.append((perm[-1], offset + (n - 1) * slot_len, period))
        entries = tuple(parts)
    return Schedule(entries=entries, period=period)


@dataclass(frozen=True)
class Interface:
    kind: str  # "static" | "dynamic"
    schedule: Schedule


@dataclass(frozen=True)
class InterfaceAssignment:
    """Per-node interface list produced by one CIA strategy."""

    strategy: Strategy
    interfaces: tuple[tuple[Interface, ...], ...]
    n_channels: int
    slot_len: int
    seed: int

    @property
    def n_nodes(self) -> int:
        return len(self.interfaces)

    @property
    def n_interfaces(self) -> int:
        return len(self.interfaces[0])

    def node_interfaces(self, v: int) -> tuple[Interface, ...]:
        if not (0 <= v < self.n_nodes):
            raise KeyError(f"unknown node id {v}")
        return self.interfaces[v]

    def static_channels(self, v: int) -> tuple[int, ...]:
        """Channels of v's static interfaces, in interface order."""
        return tuple(
            i.schedule.channel_at(0) for i in self.node_interfaces(v) if i.kind == "static"
        )

    def has_dynamic(self, v: int) -> bool:
        return any(i.kind == "dynamic" for i in self.node_interfaces(v))

    def dynamic_indices(self, v: int) -> tuple[int, ...]:
        return tuple(
            k for k, i in enumerate(self.node_interfaces(v)) if i.kind == "dynamic"
        )


def _check_counts(n_interfaces: int, n_channels: int) -> None:
    if n_interfaces < 1:
        raise ConfigurationError(f"need at least one interface, got {n_interfaces}")
    if n_channels < 1:
        raise ConfigurationError(f"need at least one channel, got {n_channels}")
    if n_interfaces > n_channels:
        raise ConfigurationError(
            f"{n_interfaces} interfaces cannot hold distinct channels out of {n_channels}"
        )


def _phase(seed: int, node: int, slot_len: int) -> int:
    return mix(seed, _TAG_PHASE, node) % slot_len


def _node_perm(seed: int, node: int, pool: list[int]) -> list[int]:
    rng = np.random.default_rng(mix(seed, _TAG_PERM, node))
    return [pool[i] for i in rng.permutation(len(pool))]


def pseudorandom_static_channels(
    node: int, n_interfaces: int, n_channels: int, seed: int
) -> tuple[int, ...]:
    """Distinct seeded channels for a node's static interfaces.

    Pure function of (node id, seed), so neighbors can recompute it without
    any message exchange.
    """
    chosen: list[int] = []
    for k in range(n_interfaces):
        ctr = 0
        while True:
            c = mix(seed, _TAG_CHANNEL, node, k, ctr) % n_channels
            if c not in chosen:
                chosen.append(c)
                break
            ctr += 1
    return tuple(chosen)


def assign_static_common(
    topo: Topology, n_interfaces: int, n_channels: int
) -> InterfaceAssignment:
    """Common Channel Set: every node's interface i is static on channel i."""
    _check_counts(n_interfaces, n_channels)
    per_node = tuple(
        Interface("static", static_schedule(i)) for i in range(n_interfaces)
    )
    return InterfaceAssignment(
        strategy=Strategy.StaticCommon,
        interfaces=tuple(per_node for _ in range(topo.n_nodes)),
        n_channels=n_channels,
        slot_len=1,
        seed=0,
    )


def assign_static_pseudorandom(
    topo: Topology, n_interfaces: int, n_channels: int, seed: int
) -> InterfaceAssignment:
    """Each node statically tunes to distinct seeded-pseudo-random channels."""
    _check_counts(n_interfaces, n_channels)
    nodes = []
    for v in range(topo.n_nodes):
        chans = pseudorandom_static_channels(v, n_interfaces, n_channels, seed)
        nodes.append(tuple(Interface("static", static_schedule(c)) for c in chans))
    return InterfaceAssignment(
        strategy=Strategy.StaticPseudoRandom,
        interfaces=tuple(nodes),
        n_channels=n_channels,
        slot_len=1,
        seed=seed,
    )


def _dynamic_block(
    seed: int, node: int, pool: list[int], slot_len: int, count: int, offset: int
) -> list[Interface]:
    """``count`` dynamic interfaces cycling over ``pool``; interface k uses the
    node's base permutation rotated by k, so the node's interfaces never
    collide on a channel."""
    base = _node_perm(seed, node, pool)
    n = len(base)
    out = []
    for k in range(count):
        perm = [base[(i + k) % n] for i in range(n)]
        out.append(Interface("dynamic", _offset_entries(perm, slot_len, offset)))
    return out


def assign_dynamic_adaptive(
    topo: Topology, n_interfaces: int, n_channels: int, slot_len: int, seed: int
) -> InterfaceAssignment:
    """All interfaces dynamic, equally sharing time over all channels."""
    _check_counts(n_interfaces, n_channels)
    if slot_len <= 0:
        raise ConfigurationError(f"slot_len must be positive, got {slot_len}")
    pool = list(range(n_channels))
    nodes = []
    for v in range(topo.n_nodes):
        off = _phase(seed, v, slot_len)
        nodes.append(tuple(_dynamic_block(seed, v, pool, slot_len, n_interfaces, off)))
    return InterfaceAssignment(
        strategy=Strategy.DynamicAdaptive,
        interfaces=tuple(nodes),
        n_channels=n_channels,
        slot_len=slot_len,
        seed=seed,
    )


def assign_mixed_common_adaptive(
    topo: Topology, n_interfaces: int, n_channels: int, slot_len: int, seed: int
) -> InterfaceAssignment:
    """Interface 0 static on the control channel 0; the rest dynamic over {1..C-1}."""
    if n_interfaces < 2:
        raise ConfigurationError("mixed assignment needs at least one static and one dynamic interface")
    _check_counts(n_interfaces, n_channels)
    if slot_len <= 0:
        raise ConfigurationError(f"slot_len must be positive, got {slot_len}")
    pool = list(range(1, n_channels))
    nodes = []
    for v in range(topo.n_nodes):
        off = _phase(seed, v, slot_len)
        ifaces = [Interface("static", static_schedule(0))]
        ifaces.extend(_dynamic_block(seed, v, pool, slot_len, n_interfaces - 1, off))
        nodes.append(tuple(ifaces))
    return InterfaceAssignment(
        strategy=Strategy.MixedCommonAdaptive,
        interfaces=tuple(nodes),
        n_channels=n_channels,
        slot_len=slot_len,
        seed=seed,
    )


def assign_mixed_pseudorandom_adaptive(
    topo: Topology, n_interfaces: int, n_channels: int, slot_len: int, seed: int
) -> InterfaceAssignment:
    """One static receive interface on a seeded channel; the rest dynamic.

    Dynamic interfaces cycle over every channel except the node's own static
    one (they can still be tuned anywhere on demand for transmissions).
    """
    if n_interfaces < 2:
        raise ConfigurationError("mixed assignment needs at least one static and one dynamic interface")
    _check_counts(n_interfaces, n_channels)
    if slot_len <= 0:
        raise ConfigurationError(f"slot_len must be positive, got {slot_len}")
    nodes = []
    for v in range(topo.n_nodes):
        (s,) = pseudorandom_static_channels(v, 1, n_channels, seed)
        pool = [c for c in range(n_channels) if c != s]
        off = _phase(seed, v, slot_len)
        ifaces = [Interface("static", static_schedule(s))]
        ifaces.extend(_dynamic_block(seed, v, pool, slot_len, n_interfaces - 1, off))
        nodes.append(tuple(ifaces))
    return InterfaceAssignment(
        strategy=Strategy.MixedPseudoRandomAdaptive,
        interfaces=tuple(nodes),
        n_channels=n_channels,
        slot_len=slot_len,
        seed=seed,
    )


def build_assignment(
    strategy: Strategy,
    topo: Topology,
    n_interfaces: int,
    n_channels: int,
    slot_len: int,
    seed: int,
) -> InterfaceAssignment:
    """Dispatch to the strategy's assignment constructor."""
    if strategy is Strategy.StaticCommon:
        return assign_static_common(topo, n_interfaces, n_channels)
    if strategy is Strategy.StaticPseudoRandom:
        return assign_static_pseudorandom(topo, n_interfaces, n_channels, seed)
    if strategy is Strategy.DynamicAdaptive:
        return assign_dynamic_adaptive(topo, n_interfaces, n_channels, slot_len, seed)
    if strategy is Strategy.MixedCommonAdaptive:
        return assign_mixed_common_adaptive(topo, n_interfaces, n_channels, slot_len, seed)
    if strategy is Strategy.MixedPseudoRandomAdaptive:
        return assign_mixed_pseudorandom_adaptive(topo, n_interfaces, n_channels, slot_len, seed)
    raise ConfigurationError(f"unknown strategy {strategy!r}")


def schedules_intersect(s1: Schedule, s2: Schedule) -> list[tuple[int, int, int]]:
    """Maximal intervals of one hyperperiod during which both schedules share a channel.

    Returns (channel, t_start, t_stop) triples within [0, lcm(periods));
    an empty list means the interface pair is deaf.
    """
    hyper = math.lcm(s1.period, s2.period)
    boundaries = {0, hyper}
    for s in (s1, s2):
        boundaries.update(s.switching_instants(hyper))
    cuts = sorted(boundaries)
    out: list[tuple[int, int, int]] = []
    for a, b in zip(cuts, cuts[1:]):
        c1 = s1.channel_at(a)
        if c1 != s2.channel_at(a):
            continue
        if out and out[-1][0] == c1 and out[-1][2] == a:
            out[-1] = (c1, out[-1][1], b)
        else:
            out.append((c1, a, b))
    return out


def channels_at(schedule: Schedule, ticks: np.ndarray) -> np.ndarray:
    """Vectorized :meth:`Schedule.channel_at` over an array of ticks."""
    starts = np.asarray([start for _, start, _ in schedule.entries], dtype=np.int64)
    chans = np.asarray([ch for ch, _, _ in schedule.entries], dtype=np.int64)
    t = np.asarray(ticks, dtype=np.int64) % schedule.period
    idx = np.searchsorted(starts, t, side="right") - 1
    return chans[idx]


def _interfaces_meet(ifaces_u, ifaces_v) -> bool:
    for iu in ifaces_u:
        for iv in ifaces_v:
            if schedules_intersect(iu.schedule, iv.schedule):
                return True
    return False


def mc_neighbors(topo: Topology, assignment: InterfaceAssignment, v: int) -> set[int]:
    """Radio neighbors of ``v`` reachable in the multi-channel topology.

    A radio neighbor counts only if some interface pair shares a channel at
    some instant (virtual neighbors are excluded).
    """
    out = set()
    ifaces_v = assignment.node_interfaces(v)
    for u in topo.radio_neighbors(v):
        if _interfaces_meet(ifaces_v, assignment.node_interfaces(u)):
            out.add(u)
    return out


def mc_adjacency(topo: Topology, assignment: InterfaceAssignment) -> dict[int, set[int]]:
    """Multi-channel adjacency for every node at once.

    Uses per-strategy shortcuts where connectivity is guaranteed by
    construction; falls back to schedule comparison for DynamicAdaptive.
    The shortcuts are property-tested against :func:`mc_neighbors`.
    """
    strat = assignment.strategy
    n = topo.n_nodes
    if strat in (Strategy.StaticCommon, Strategy.MixedCommonAdaptive,
                 Strategy.MixedPseudoRandomAdaptive):
        # a common static channel (0, or the pair's static/dynamic pools)
        # guarantees every radio neighbor is reachable
        return {v: topo.radio_neighbors(v) for v in range(n)}
    if strat is Strategy.StaticPseudoRandom:
        sets = [set(assignment.static_channels(v)) for v in range(n)]
        return {
            v: {u for u in topo.radio_neighbors(v) if sets[v] & sets[u]}
            for v in range(n)
        }
    # DynamicAdaptive: every interface shares one period; compare channel
    # functions on the union grid of all switching instants
    min_ifaces = min(len(assignment.interfaces[v]) for v in range(n))
    if 2 * min_ifaces > assignment.n_channels:
        # pigeonhole: two nodes always hold overlapping channel sets
        return {v: topo.radio_neighbors(v) for v in range(n)}
    period = 1
    for v in range(n):
        for iface in assignment.interfaces[v]:
            period = math.lcm(period, iface.schedule.period)
    cuts = sorted({0} | {
        t
        for v in range(n)
        for iface in assignment.interfaces[v]
        for t in iface.schedule.switching_instants(period)
    })
    t = np.asarray(cuts, dtype=np.int64)
    chans = [
        np.stack([channels_at(iface.schedule, t) for iface in assignment.interfaces[v]])
        for v in range(n)
    ]
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for (u, v) in topo.links:
        if (chans[u][:, None, :] == chans[v][None, :, :]).any():
            adj[u].add(v)
            adj[v].add(u)
    return adj


@dataclass(frozen=True)
class Timeslot:
    """Maximal interval during which every relevant interface holds one channel.

    ``channels`` maps (node id, interface index) to the channel held during
    the slot, for the owner and each of its multi-channel neighbors.
    """

    t_start: int
    t_stop: int
    channels: dict[tuple[int, int], int]


def neighborhood_hyperperiod(assignment: InterfaceAssignment, nodes) -> int:
    h = 1
    for v in nodes:
        for iface in assignment.node_interfaces(v):
            h = math.lcm(h, iface.schedule.period)
    return h


def build_timeslots(
    topo: Topology,
    assignment: InterfaceAssignment,
    v: int,
    horizon: int | None = None,
    neighbors: set[int] | None = None,
) -> list[Timeslot]:
    """Partition the horizon at every switching instant of v and its neighbors."""
    if neighbors is None:
        neighbors = mc_neighbors(topo, assignment, v)
    nodes = [v] + sorted(neighbors)
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
    slots = []
    for a, b in zip(cuts, cuts[1:]):
        chan = {
            (u, k): iface.schedule.channel_at(a)
            for u in nodes
            for k, iface in enumerate(assignment.node_interfaces(u))
        }
        slots.append(Timeslot(t_start=a, t_stop=b, channels=chan))
    return slots


def dump_schedules_csv(assignment: InterfaceAssignment) -> list[str]:
    """Debug dump: one CSV row per schedule entry."""
    rows = ["node,interface,channel,t_start,t_stop"]
    for v in range(assignment.n_nodes):
        for k, iface in enumerate(assignment.node_interfaces(v)):
            for ch, a, b in iface.schedule.entries:
                rows.append(f"{v},{k},{ch},{a},{b}")
    return rows
