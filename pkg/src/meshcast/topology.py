"""Random node placement, distance-based packet error model and the radio topology.

Nodes are placed uniformly in a square whose side is chosen so that the
expected number of *retained* neighbors per node (links whose packet error
probability does not exceed ``p_p_max``) matches a target density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .seeding import rng_from


@dataclass(frozen=True)
class PerModel:
    """Piecewise-linear packet-error-rate vs distance model.

    PER is ``per_floor`` up to ``d_full``, ramps linearly to 1 at ``d_cutoff``
    and stays 1 beyond it.
    """

    d_full: float = 50.0
    d_cutoff: float = 100.0
    per_floor: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.per_floor < 1.0):
            raise ConfigurationError(f"per_floor must be in [0,1), got {self.per_floor}")
        if not (0.0 < self.d_full < self.d_cutoff):
            raise ConfigurationError(
                f"need 0 < d_full < d_cutoff, got d_full={self.d_full}, d_cutoff={self.d_cutoff}"
            )


def per_from_distance(d: float, model: PerModel) -> float:
    """Packet error probability of a link of length ``d`` meters."""
    if d < 0:
        raise ValueError(f"distance must be non-negative, got {d}")
    if d <= model.d_full:
        return model.per_floor
    if d >= model.d_cutoff:
        return 1.0
    frac = (d - model.d_full) / (model.d_cutoff - model.d_full)
    return model.per_floor + frac * (1.0 - model.per_floor)


def retention_radius(model: PerModel, p_p_max: float) -> float:
    """Largest distance at which a link is still retained (PER <= p_p_max).

    Found by bisection on the monotone PER curve, so it works for any
    monotone model parameterization.
    """
    if per_from_distance(0.0, model) > p_p_max:
        raise ConfigurationError(
            f"per_floor={model.per_floor} exceeds p_p_max={p_p_max}: no link can be retained"
        )
    lo, hi = 0.0, model.d_cutoff
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if per_from_distance(mid, model) <= p_p_max:
            lo = mid
        else:
            hi = mid
    return lo


def coverage_area(model: PerModel, p_p_max: float) -> float:
    """Expected per-node coverage mass: area of the disk of retained links."""
    r = retention_radius(model, p_p_max)
    return math.pi * r * r


def _pair_cdf(r: float, side: float) -> float:
    """P(|p1 - p2| <= r) for two independent uniform points in a side x side
    square; closed form valid for r <= side."""
    return (
        math.pi * r * r * side * side - (8.0 / 3.0) * r**3 * side + 0.5 * r**4
    ) / side**4


def side_for_density(n_nodes: int, target_density: float, radius: float) -> float:
    """Square side making the expected retained degree equal target_density.

    Solves (n-1) * P(pair distance <= radius) = density with the exact
    uniform-square distance CDF, so border effects do not bias the degree.
    """
    target = target_density / (n_nodes - 1)
    if target >= _pair_cdf(radius, radius):
        # denser than the solvable range of the CDF form; a radius-sized
        # square is (almost) a complete graph already
        return radius
    lo, hi = radius, 2.0 * radius
    while _pair_cdf(radius, hi) > target:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _pair_cdf(radius, mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class Link:
    """Undirected retained radio link between two nodes."""

    u: int
    v: int
    distance: float
    p_deliv: float


@dataclass(frozen=True)
class Topology:
    """Immutable radio topology: node positions plus retained links."""

    positions: np.ndarray  # shape (n, 2)
    links: dict[tuple[int, int], Link]  # keyed by (u, v) with u < v
    side_length: float
    p_p_max: float
    per_model: PerModel
    _adjacency: dict[int, tuple[int, ...]] = field(repr=False, default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return self.positions.shape[0]

    def _check_node(self, v: int) -> None:
        if not (0 <= v < self.n_nodes):
            raise KeyError(f"unknown node id {v}")

    def radio_neighbors(self, v: int) -> set[int]:
        """All nodes sharing a retained radio link with ``v``."""
        self._check_node(v)
        return set(self._adjacency.get(v, ()))

    def p_deliv(self, u: int, v: int) -> float:
        """Delivery probability of the retained link (u, v)."""
        self._check_node(u)
        self._check_node(v)
        key = (u, v) if u < v else (v, u)
        return self.links[key].p_deliv

    def mean_degree(self) -> float:
        return 2.0 * len(self.links) / self.n_nodes


def generate_topology(
    n_nodes: int,
    target_density: float,
    per_model: PerModel,
    p_p_max: float,
    seed: int,
) -> Topology:
    """Place ``n_nodes`` uniformly at random at the requested neighbor density.

    The square side is solved from the exact uniform-square pair-distance
    distribution so that the expected retained degree equals
    ``target_density`` (border effects included). Links carry
    p_deliv = 1 - PER(distance) and only pairs with PER <= p_p_max are kept.
    Deterministic for a fixed seed.
    """
    if n_nodes < 2:
        raise ConfigurationError(f"need at least 2 nodes, got {n_nodes}")
    if not (0.0 < target_density <= n_nodes - 1):
        raise ConfigurationError(
            f"target_density must be in (0, {n_nodes - 1}], got {target_density}"
        )
    if not (0.0 < p_p_max < 1.0):
        raise ConfigurationError(f"p_p_max must be in (0,1), got {p_p_max}")

    radius = retention_radius(per_model, p_p_max)
    side = side_for_density(n_nodes, target_density, radius)
    rng = rng_from(seed)
    positions = rng.uniform(0.0, side, size=(n_nodes, 2))

    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=-1))

    links: dict[tuple[int, int], Link] = {}
    adjacency: dict[int, list[int]] = {v: [] for v in range(n_nodes)}
    iu, iv = np.triu_indices(n_nodes, k=1)
    pair_dist = dist[iu, iv]
    ramp = (pair_dist - per_model.d_full) / (per_model.d_cutoff - per_model.d_full)
    pair_per = per_model.per_floor + np.clip(ramp, 0.0, 1.0) * (1.0 - per_model.per_floor)
    keep = pair_per <= p_p_max
    for u, v, d, per in zip(
        iu[keep].tolist(), iv[keep].tolist(), pair_dist[keep].tolist(), pair_per[keep].tolist()
    ):
        links[(u, v)] = Link(u, v, d, 1.0 - per)
        adjacency[u].append(v)
        adjacency[v].append(u)

    adj = {v: tuple(sorted(ns)) for v, ns in adjacency.items()}
    return Topology(
        positions=positions,
        links=links,
        side_length=side,
        p_p_max=p_p_max,
        per_model=per_model,
        _adjacency=adj,
    )


def dump_topology_csv(topo: Topology):
    """Debug dump as two lists of CSV rows: nodes and links."""
    node_rows = ["node_id,x,y"]
    for i in range(topo.n_nodes):
        x, y = topo.positions[i]
        node_rows.append(f"{i},{x!r},{y!r}")
    link_rows = ["u,v,distance,p_deliv"]
    for (u, v), link in sorted(topo.links.items()):
        link_rows.append(f"{u},{v},{link.distance!r},{link.p_deliv!r}")
    return node_rows, link_rows
