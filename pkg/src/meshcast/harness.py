"""Replicated scenario runs and parameter sweeps with 95% confidence intervals."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .broadcast import plan_broadcast
from .cia import Strategy, build_assignment, mc_adjacency
from .errors import ConfigurationError, MeshcastError
from .metrics import channel_loads, jain_index, overhead
from .seeding import mix, rng_from
from .topology import PerModel, generate_topology

SWEEPABLE_PARAMETERS = ("n_nodes", "density", "n_interfaces", "p_cover_min")


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation scenario; defaults follow the evaluation setup."""

    n_nodes: int = 200
    density: float = 10.0
    n_interfaces: int = 3
    channels: int = 12
    strategy: Strategy = Strategy.StaticCommon
    p_cover_min: float = 0.95
    p_p_max: float = 0.5
    per_model: PerModel = field(default_factory=PerModel)
    slot_len: int = 100
    replications: int = 30
    base_seed: int = 0

    def validate(self) -> None:
        if self.n_nodes < 2:
            raise ConfigurationError(f"n_nodes must be >= 2, got {self.n_nodes}")
        if not (0.0 < self.density <= self.n_nodes - 1):
            raise ConfigurationError(
                f"density must be in (0, {self.n_nodes - 1}], got {self.density}"
            )
        if not (0.0 < self.p_cover_min < 1.0):
            raise ConfigurationError(f"p_cover_min must be in (0,1), got {self.p_cover_min}")
        if not (0.0 < self.p_p_max < 1.0):
            raise ConfigurationError(f"p_p_max must be in (0,1), got {self.p_p_max}")
        if self.slot_len <= 0:
            raise ConfigurationError(f"slot_len must be positive, got {self.slot_len}")
        if self.replications < 2:
            raise ConfigurationError(
                f"need at least 2 replications for confidence intervals, got {self.replications}"
            )
        if self.n_interfaces < 1 or self.n_interfaces > self.channels:
            raise ConfigurationError(
                f"n_interfaces must be in [1, {self.channels}], got {self.n_interfaces}"
            )


@dataclass(frozen=True)
class MetricSample:
    overhead: float
    jain: float


@dataclass(frozen=True)
class ScenarioResult:
    overhead_mean: float
    overhead_ci: float
    jain_mean: float
    jain_ci: float
    replications: int


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    strategies: tuple[Strategy, ...]

    def validate(self) -> None:
        if self.parameter not in SWEEPABLE_PARAMETERS:
            raise ConfigurationError(
                f"unknown sweep parameter {self.parameter!r}; "
                f"expected one of {SWEEPABLE_PARAMETERS}"
            )
        if not self.values:
            raise ConfigurationError("sweep needs at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigurationError(f"sweep values must be strictly increasing: {self.values}")
        if not self.strategies:
            raise ConfigurationError("sweep needs at least one strategy")


@dataclass(frozen=True)
class ResultRow:
    value: float
    strategy: Strategy
    overhead_mean: float
    overhead_ci: float
    jain_mean: float
    jain_ci: float
    replications: int


@dataclass
class ResultTable:
    rows: list[ResultRow] = field(default_factory=list)
    errors: list[tuple[float, Strategy, str]] = field(default_factory=list)


def run_replication(config: ScenarioConfig, rep_index: int) -> MetricSample:
    """One independent replication: fresh topology, assignment, one plan per node."""
    config.validate()
    master = mix(config.base_seed, rep_index)
    topo = generate_topology(
        config.n_nodes,
        config.density,
        config.per_model,
        config.p_p_max,
        seed=mix(master, 0),
    )
    assignment = build_assignment(
        config.strategy,
        topo,
        config.n_interfaces,
        config.channels,
        config.slot_len,
        seed=mix(master, 1),
    )
    rng = rng_from(master, 2)
    adjacency = mc_adjacency(topo, assignment)
    plans = [
        plan_broadcast(
            v, topo, assignment, config.strategy, config.p_cover_min, rng,
            neighbors=adjacency[v],
        )
        for v in range(topo.n_nodes)
    ]
    loads = channel_loads(plans, config.channels)
    return MetricSample(overhead=overhead(plans), jain=jain_index(loads))


def _t_interval(samples: np.ndarray) -> tuple[float, float]:
    """Mean and Student-t 95% confidence half-width."""
    n = len(samples)
    mean = float(np.mean(samples))
    sd = float(np.std(samples, ddof=1))
    if sd == 0.0:
        return mean, 0.0
    t = float(stats.t.ppf(0.975, n - 1))
    return mean, t * sd / math.sqrt(n)


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Aggregate all replications of one scenario."""
    config.validate()
    samples = [run_replication(config, rep) for rep in range(config.replications)]
    ov = np.asarray([s.overhead for s in samples])
    ja = np.asarray([s.jain for s in samples])
    ov_mean, ov_ci = _t_interval(ov)
    ja_mean, ja_ci = _t_interval(ja)
    return ScenarioResult(
        overhead_mean=ov_mean,
        overhead_ci=ov_ci,
        jain_mean=ja_mean,
        jain_ci=ja_ci,
        replications=config.replications,
    )


def _cell_config(base: ScenarioConfig, parameter: str, value, strategy: Strategy) -> ScenarioConfig:
    kwargs = {"strategy": strategy}
    if parameter in ("n_nodes", "n_interfaces"):
        kwargs[parameter] = int(value)
    else:
        kwargs[parameter] = float(value)
    return dataclasses.replace(base, **kwargs)


def _run_cell(args):
    base, parameter, value, strategy = args
    config = _cell_config(base, parameter, value, strategy)
    return run_scenario(config)


def run_sweep(spec: SweepSpec, base: ScenarioConfig, jobs: int = 1) -> ResultTable:
    """Cross-product of sweep values and strategies; failed cells are recorded,
    not fatal."""
    spec.validate()
    cells = [(value, strategy) for value in spec.values for strategy in spec.strategies]
    table = ResultTable()
    results: dict[tuple, object] = {}
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                cell: pool.submit(_run_cell, (base, spec.parameter, cell[0], cell[1]))
                for cell in cells
            }
        for cell, fut in futures.items():
            try:
                results[cell] = fut.result()
            except MeshcastError as exc:
                results[cell] = exc
    else:
        for cell in cells:
            try:
                results[cell] = _run_cell((base, spec.parameter, cell[0], cell[1]))
            except MeshcastError as exc:
                results[cell] = exc
    for value, strategy in cells:
        res = results[(value, strategy)]
        if isinstance(res, MeshcastError):
            table.errors.append((float(value), strategy, str(res)))
            continue
        table.rows.append(
            ResultRow(
                value=float(value),
                strategy=strategy,
                overhead_mean=res.overhead_mean,
                overhead_ci=res.overhead_ci,
                jain_mean=res.jain_mean,
                jain_ci=res.jain_ci,
                replications=res.replications,
            )
        )
    return table


def result_table_csv(table: ResultTable) -> list[str]:
    """Render a ResultTable with the shared CSV schema (shortest round-trip floats)."""
    rows = ["param,strategy,overhead_mean,overhead_ci,jain_mean,jain_ci,reps"]
    for r in table.rows:
        rows.append(
            f"{r.value!r},{r.strategy.value},{r.overhead_mean!r},{r.overhead_ci!r},"
            f"{r.jain_mean!r},{r.jain_ci!r},{r.replications}"
        )
    return rows
