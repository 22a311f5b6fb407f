"""meshcast: local broadcast with probabilistic delivery guarantees in
multi-channel multi-interface wireless mesh networks."""

from .broadcast import (
    BroadcastPlan,
    CoverageState,
    Transmission,
    copies_required,
    coverage_probability,
    plan_broadcast,
    plan_common_channel,
    plan_greedy_dynamic,
    plan_greedy_static,
    update_pcover,
)
from .cia import (
    Interface,
    InterfaceAssignment,
    Schedule,
    Strategy,
    Timeslot,
    assign_dynamic_adaptive,
    assign_mixed_common_adaptive,
    assign_mixed_pseudorandom_adaptive,
    assign_static_common,
    assign_static_pseudorandom,
    build_assignment,
    build_timeslots,
    mc_adjacency,
    mc_neighbors,
    schedules_intersect,
)
from .errors import ConfigurationError, MeshcastError, PlanIntegrityError, UncoverableError
from .harness import (
    MetricSample,
    ResultTable,
    ScenarioConfig,
    ScenarioResult,
    SweepSpec,
    run_replication,
    run_scenario,
    run_sweep,
)
from .metrics import channel_loads, jain_index, overhead
from .topology import Link, PerModel, Topology, generate_topology, per_from_distance

__version__ = "0.1.0"
