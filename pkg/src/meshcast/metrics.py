"""Evaluation metrics: per-node broadcast overhead and Jain fairness of channel load."""

from __future__ import annotations

import numpy as np

from .broadcast import BroadcastPlan
from .errors import MeshcastError


def overhead(plans: list[BroadcastPlan]) -> float:
    """Average number of transmissions per node."""
    if not plans:
        raise MeshcastError("overhead is undefined for an empty node set")
    return sum(len(p) for p in plans) / len(plans)


def channel_loads(plans: list[BroadcastPlan], n_channels: int) -> np.ndarray:
    """Transmission count per channel (uniform packet size, so packets == bandwidth units)."""
    loads = np.zeros(n_channels)
    for plan in plans:
        for tx in plan.transmissions:
            if not (0 <= tx.channel < n_channels):
                raise MeshcastError(
                    f"transmission on channel {tx.channel} outside [0, {n_channels})"
                )
            loads[tx.channel] += 1.0
    return loads


def jain_index(loads: np.ndarray) -> float:
    """Jain fairness of the per-channel loads: (sum B)^2 / (C * sum B^2)."""
    loads = np.asarray(loads, dtype=float)
    if loads.size == 0 or not (loads > 0).any():
        raise MeshcastError("Jain index is undefined for an all-zero load vector")
    if (loads < 0).any():
        raise MeshcastError("channel loads must be non-negative")
    total = loads.sum()
    return float(total * total / (loads.size * (loads * loads).sum()))
