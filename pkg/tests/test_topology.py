import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshcast.errors import ConfigurationError
from meshcast.topology import (
    PerModel,
    coverage_area,
    generate_topology,
    per_from_distance,
    retention_radius,
)

MODEL = PerModel(d_full=50.0, d_cutoff=100.0, per_floor=0.0)


class TestPerFromDistance:
    def test_at_transmitter(self):
        assert per_from_distance(0.0, MODEL) == 0.0

    def test_cutoff_endpoint(self):
        assert per_from_distance(100.0, MODEL) == 1.0

    def test_linear_midpoint(self):
        # independent evaluation of the interpolation: per_floor + frac * (1 - per_floor)
        expected = 0.0 + ((75.0 - 50.0) / (100.0 - 50.0)) * (1.0 - 0.0)
        assert per_from_distance(75.0, MODEL) == pytest.approx(expected)
        assert per_from_distance(75.0, MODEL) == pytest.approx(0.5)

    def test_negative_distance_rejected(self):
        with pytest.raises(ValueError):
            per_from_distance(-1.0, MODEL)

    @given(
        d1=st.floats(min_value=0, max_value=200),
        d2=st.floats(min_value=0, max_value=200),
    )
    def test_monotone(self, d1, d2):
        lo, hi = sorted((d1, d2))
        assert per_from_distance(lo, MODEL) <= per_from_distance(hi, MODEL)

    def test_floor_respected(self):
        model = PerModel(d_full=10.0, d_cutoff=20.0, per_floor=0.1)
        assert per_from_distance(5.0, model) == 0.1
        assert 0.1 <= per_from_distance(15.0, model) <= 1.0


class TestPerModelValidation:
    def test_bad_floor(self):
        with pytest.raises(ConfigurationError):
            PerModel(per_floor=1.0)

    def test_bad_distances(self):
        with pytest.raises(ConfigurationError):
            PerModel(d_full=100.0, d_cutoff=50.0)


class TestRetentionRadius:
    def test_default_model(self):
        # PER crosses 0.5 halfway up the ramp: 50 + 0.5 * 50 = 75 m
        assert retention_radius(MODEL, 0.5) == pytest.approx(75.0, abs=1e-6)

    def test_area(self):
        assert coverage_area(MODEL, 0.5) == pytest.approx(math.pi * 75.0**2, rel=1e-6)

    def test_floor_above_ppmax_rejected(self):
        model = PerModel(per_floor=0.6)
        with pytest.raises(ConfigurationError):
            retention_radius(model, 0.5)


class TestGenerateTopology:
    def test_two_node_case(self):
        # frozen seed: the two nodes land within d_full, so the single link is perfect
        topo = generate_topology(2, 1, MODEL, 0.5, seed=0)
        assert len(topo.links) == 1
        link = topo.links[(0, 1)]
        assert link.distance <= MODEL.d_full
        assert link.p_deliv == 1.0 - MODEL.per_floor == 1.0

    def test_mean_degree_near_target(self):
        topo = generate_topology(200, 10, MODEL, 0.5, seed=42)
        assert abs(topo.mean_degree() - 10) / 10 < 0.15

    def test_degree_calibration_over_seeds(self):
        degrees = [
            generate_topology(200, 10, MODEL, 0.5, seed=s).mean_degree() for s in range(30)
        ]
        grand = float(np.mean(degrees))
        assert abs(grand - 10) / 10 < 0.10

    def test_determinism(self):
        a = generate_topology(50, 6, MODEL, 0.5, seed=7)
        b = generate_topology(50, 6, MODEL, 0.5, seed=7)
        assert np.array_equal(a.positions, b.positions)
        assert a.links == b.links
        assert a.side_length == b.side_length

    def test_positions_inside_square(self):
        topo = generate_topology(100, 8, MODEL, 0.5, seed=3)
        assert (topo.positions >= 0).all()
        assert (topo.positions <= topo.side_length).all()

    def test_links_respect_filter_and_symmetry(self):
        for seed in range(5):
            topo = generate_topology(60, 8, MODEL, 0.5, seed=seed)
            for (u, v), link in topo.links.items():
                assert u < v and u != v
                assert 1.0 - link.p_deliv <= topo.p_p_max + 1e-12
                assert v in topo.radio_neighbors(u)
                assert u in topo.radio_neighbors(v)
                assert topo.p_deliv(u, v) == topo.p_deliv(v, u)

    def test_density_unreachable(self):
        with pytest.raises(ConfigurationError):
            generate_topology(5, 10, MODEL, 0.5, seed=0)

    def test_too_few_nodes(self):
        with pytest.raises(ConfigurationError):
            generate_topology(1, 0.5, MODEL, 0.5, seed=0)


class TestRadioNeighbors:
    def test_isolated_node(self):
        topo = generate_topology(30, 2, MODEL, 0.5, seed=3)
        assert topo.radio_neighbors(2) == set()

    def test_two_node_linked(self):
        topo = generate_topology(2, 1, MODEL, 0.5, seed=0)
        assert topo.radio_neighbors(0) == {1}
        assert topo.radio_neighbors(1) == {0}

    def test_unknown_id(self):
        topo = generate_topology(10, 3, MODEL, 0.5, seed=0)
        with pytest.raises(KeyError):
            topo.radio_neighbors(10)

    def test_matches_pairwise_oracle(self):
        # O(n^2) recomputation from positions and the PER filter
        topo = generate_topology(30, 5, MODEL, 0.5, seed=11)
        for v in range(topo.n_nodes):
            expected = set()
            for u in range(topo.n_nodes):
                if u == v:
                    continue
                d = float(np.linalg.norm(topo.positions[u] - topo.positions[v]))
                if per_from_distance(d, MODEL) <= topo.p_p_max:
                    expected.add(u)
            assert topo.radio_neighbors(v) == expected
