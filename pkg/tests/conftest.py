import numpy as np

from meshcast.topology import Link, PerModel, Topology

# verdict lines collected by the acceptance suite, flushed after capture ends
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)


def make_topology(n_nodes, link_probs):
    """Hand-built topology: ``link_probs`` maps (u, v) with u < v to p_deliv."""
    links = {}
    adjacency = {v: [] for v in range(n_nodes)}
    for (u, v), p in link_probs.items():
        assert u < v
        links[(u, v)] = Link(u, v, distance=0.0, p_deliv=p)
        adjacency[u].append(v)
        adjacency[v].append(u)
    return Topology(
        positions=np.zeros((n_nodes, 2)),
        links=links,
        side_length=1.0,
        p_p_max=0.5,
        per_model=PerModel(),
        _adjacency={v: tuple(sorted(ns)) for v, ns in adjacency.items()},
    )
