import math

import numpy as np
import pytest

from partialnet.connectivity import (classify_regime, connectivity_probability,
                                     mean_shortest_path, phase_sweep,
                                     reachability, sweep_to_csv)
from partialnet.geometry import NetworkSnapshot, Region


def snapshot_from_adjacency(adj):
    n = adj.shape[0]
    return NetworkSnapshot(np.zeros((n, 2)), adj, r0=1.0, region=Region.torus(1.0))


def complete(n):
    return ~np.eye(n, dtype=bool)


class TestReachability:
    def test_complete_graph(self):
        assert reachability(snapshot_from_adjacency(complete(6))) == 1.0

    def test_all_isolated(self):
        assert reachability(snapshot_from_adjacency(np.zeros((5, 5), dtype=bool))) == 0.0

    def test_component_sizes_three_two(self):
        # pair-count oracle: C(3,2) + C(2,2) = 3 + 1 over C(5,2) = 10
        adj = np.zeros((5, 5), dtype=bool)
        adj[0, 1] = adj[1, 0] = adj[1, 2] = adj[2, 1] = True
        adj[3, 4] = adj[4, 3] = True
        assert reachability(snapshot_from_adjacency(adj)) == pytest.approx(0.4)

    def test_rejects_single_node(self):
        with pytest.raises(ValueError):
            reachability(snapshot_from_adjacency(np.zeros((1, 1), dtype=bool)))


class TestMeanShortestPath:
    def test_complete_graph(self):
        assert mean_shortest_path(snapshot_from_adjacency(complete(5))) == 1.0

    def test_three_node_path(self):
        adj = np.zeros((3, 3), dtype=bool)
        adj[0, 1] = adj[1, 0] = adj[1, 2] = adj[2, 1] = True
        # enumerate pairs: (0,1)=1, (1,2)=1, (0,2)=2
        assert mean_shortest_path(snapshot_from_adjacency(adj)) == pytest.approx(4 / 3)

    def test_all_isolated_undefined(self):
        assert mean_shortest_path(snapshot_from_adjacency(np.zeros((4, 4), dtype=bool))) is None


class TestConnectivityProbability:
    def test_forced_connectivity(self):
        # d large enough that r0 exceeds the torus diameter: always connected
        est = connectivity_probability(n=10, r0=1.0, d=20.0, m=50, seed=0)
        assert est.value == 1.0 and est.se == 0.0

    def test_determinism(self):
        a = connectivity_probability(n=40, r0=1.0, d=6.0, m=100, seed=5)
        b = connectivity_probability(n=40, r0=1.0, d=6.0, m=100, seed=5)
        assert a == b

    def test_binomial_se(self):
        est = connectivity_probability(n=40, r0=1.0, d=8.0, m=200, seed=1)
        assert est.se == pytest.approx(math.sqrt(est.value * (1 - est.value) / 200))


class TestPhaseSweep:
    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError):
            phase_sweep(10, 1.0, [], 5, 0)

    def test_point_shape_and_determinism(self):
        a = phase_sweep(30, 1.0, [2.0, 8.0], 40, seed=7)
        b = phase_sweep(30, 1.0, [2.0, 8.0], 40, seed=7)
        assert a == b
        assert [pt.d for pt in a] == [2.0, 8.0]
        assert all(0 <= pt.c_hat <= 1 and 0 <= pt.r_hat <= 1 for pt in a)

    def test_parallel_matches_serial(self):
        serial = phase_sweep(25, 1.0, [4.0], 30, seed=3, threads=1)
        parallel = phase_sweep(25, 1.0, [4.0], 30, seed=3, threads=2)
        assert serial == parallel

    def test_connected_snapshot_counts_toward_c_iff_reach_one(self):
        pts = phase_sweep(20, 1.0, [30.0], 25, seed=11)
        # far above the window: every snapshot connected, R = 1 exactly
        assert pts[0].c_hat == 1.0 and pts[0].r_hat == 1.0

    def test_csv_shape(self):
        pts = phase_sweep(20, 1.0, [2.0, 4.0], 10, seed=2)
        csv = sweep_to_csv(pts, seed=2)
        lines = csv.strip().splitlines()
        assert lines[0] == "# seed=2"
        assert lines[1] == "d,C,C_se,R,R_se,P,P_se,m"
        assert len(lines) == 4


class TestClassifyRegime:
    def test_high_connectivity(self):
        assert classify_regime(0.99, 1.0).label == "area1"

    def test_transition_band(self):
        assert classify_regime(0.5, 0.9).label == "area2"

    def test_disconnected_but_reachable(self):
        assert classify_regime(0.01, 0.6).label == "area3"

    def test_isolated(self):
        assert classify_regime(0.01, 0.05).label == "area4"

    def test_boundaries(self):
        assert classify_regime(0.95, 0.0).label == "area1"
        assert classify_regime(0.05, 0.5).label == "area3"
        assert classify_regime(0.0500001, 0.5).label == "area2"

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            classify_regime(1.5, 0.0)


@pytest.mark.slow
def test_connectivity_monotone_over_default_grid(default_sweep_m1000):
    """No C estimate drops by more than 3 combined standard errors."""
    pts = default_sweep_m1000
    for a, b in zip(pts, pts[1:]):
        combined = math.hypot(a.c_se, b.c_se)
        assert b.c_hat >= a.c_hat - 3 * combined, (a.d, b.d, a.c_hat, b.c_hat)
