"""Flat key=value configuration files for scenarios and sweep grids."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .cia import Strategy
from .errors import ConfigurationError
from .harness import ScenarioConfig
from .topology import PerModel

ENV_SEED = "MESHCAST_SEED"

# default sweep grids for the four figure experiments
DEFAULT_GRIDS = {
    "sweep_nodes": (50, 100, 150, 200, 250, 300),
    "sweep_density": (4.0, 6.0, 8.0, 10.0, 12.0, 14.0),
    "sweep_interfaces": tuple(range(1, 13)),
    "sweep_pcover": (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99),
}

_INT_KEYS = {"n_nodes", "n_interfaces", "channels", "slot_len", "replications", "base_seed"}
_FLOAT_KEYS = {"density", "p_cover_min", "p_p_max", "d_full", "d_cutoff", "per_floor"}
_LIST_KEYS = set(DEFAULT_GRIDS)
_RANGES = {
    "p_cover_min": (0.0, 1.0),
    "p_p_max": (0.0, 1.0),
    "per_floor": (0.0, 1.0),
}


@dataclass
class ParsedConfig:
    """Validated scenario plus sweep grids."""

    scenario: ScenarioConfig
    grids: dict[str, tuple] = field(default_factory=lambda: dict(DEFAULT_GRIDS))


def _parse_scalar(key: str, raw: str, where: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            value = float(raw)
        elif key == "strategy":
            try:
                return Strategy(raw)
            except ValueError:
                names = ", ".join(s.value for s in Strategy)
                raise ConfigurationError(
                    f"{where}: unknown strategy {raw!r}; expected one of {names}"
                ) from None
        elif key in _LIST_KEYS:
            parts = [p.strip() for p in raw.split(",") if p.strip()]
            caster = int if key in ("sweep_nodes", "sweep_interfaces") else float
            return tuple(caster(p) for p in parts)
        else:
            raise ConfigurationError(f"{where}: unknown key {key!r}")
    except ValueError:
        raise ConfigurationError(f"{where}: malformed value {raw!r} for key {key!r}") from None
    lo, hi = _RANGES.get(key, (None, None))
    if lo is not None and not (lo <= value < hi):
        raise ConfigurationError(f"{where}: {key}={value} outside [{lo},{hi})")
    return value


def _read_lines(path: str) -> list[tuple[str, str, str]]:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigurationError(
                    f"{path}:{lineno}: expected 'key = value', got {stripped!r}"
                )
            key, raw = (part.strip() for part in stripped.split("=", 1))
            entries.append((key, raw, f"{path}:{lineno}"))
    return entries


def parse_config(
    path: str,
    overrides: list[str] | None = None,
    seed_override: int | None = None,
) -> ParsedConfig:
    """Read a config file, apply key=value overrides and the seed precedence.

    Seed precedence, lowest to highest: MESHCAST_SEED environment variable,
    ``base_seed`` in the file, ``--seed`` on the command line.
    """
    values: dict[str, object] = {}
    grids = dict(DEFAULT_GRIDS)

    env_seed = os.environ.get(ENV_SEED)
    if env_seed is not None:
        try:
            values["base_seed"] = int(env_seed)
        except ValueError:
            raise ConfigurationError(f"{ENV_SEED}={env_seed!r} is not an integer") from None

    for key, raw, where in _read_lines(path):
        parsed = _parse_scalar(key, raw, where)
        if key in _LIST_KEYS:
            grids[key] = parsed
        else:
            values[key] = parsed

    for item in overrides or []:
        if "=" not in item:
            raise ConfigurationError(f"override {item!r} is not of the form key=value")
        key, raw = (part.strip() for part in item.split("=", 1))
        parsed = _parse_scalar(key, raw, f"override {item!r}")
        if key in _LIST_KEYS:
            grids[key] = parsed
        else:
            values[key] = parsed

    if seed_override is not None:
        values["base_seed"] = int(seed_override)

    per_model = PerModel(
        d_full=values.pop("d_full", PerModel.d_full),
        d_cutoff=values.pop("d_cutoff", PerModel.d_cutoff),
        per_floor=values.pop("per_floor", PerModel.per_floor),
    )
    scenario = ScenarioConfig(per_model=per_model, **values)
    scenario.validate()
    return ParsedConfig(scenario=scenario, grids=grids)
