"""Deterministic seed derivation.

Every random decision in the simulator is derived from a small integer tuple
through a splitmix64-style mixer, so runs are reproducible across processes
and platforms (no dependence on Python's salted hash()).
"""

from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF


def splitmix64(x: int) -> int:
    """One splitmix64 mixing step; maps a 64-bit integer to a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def mix(*values: int) -> int:
    """Combine integers into a single well-mixed 64-bit seed."""
    acc = 0x243F6A8885A308D3  # arbitrary non-zero start
    for v in values:
        acc = splitmix64((acc ^ (int(v) & _MASK)) & _MASK)
    return acc


def rng_from(*values: int) -> np.random.Generator:
    """A numpy Generator seeded from the mixed value of ``values``."""
    return np.random.default_rng(mix(*values))
