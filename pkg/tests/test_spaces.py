"""Metric validation, graph metrics, covering numbers, dyadic grids."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wasserlim import (
    covering_number,
    diameter,
    dyadic_interval_space,
    graph_metric,
    validate_metric,
)
from wasserlim.errors import (
    Asymmetric,
    Disconnected,
    EmptySubset,
    NegativeDistance,
    NonpositiveWeight,
    TriangleViolation,
)
from conftest import euclidean_space, seeded


class TestValidateMetric:
    def test_two_point_space(self):
        space = validate_metric(np.array([[0.0, 3.0], [3.0, 0.0]]))
        assert space.n_points == 2
        assert diameter(space) == 3.0

    def test_asymmetric_rejected(self):
        with pytest.raises(Asymmetric):
            validate_metric(np.array([[0.0, 1.0], [2.0, 0.0]]))

    def test_negative_rejected(self):
        with pytest.raises(NegativeDistance):
            validate_metric(np.array([[0.0, -1.0], [-1.0, 0.0]]))

    def test_triangle_violation_names_triple(self):
        with pytest.raises(TriangleViolation) as exc:
            validate_metric(np.array([[0.0, 1, 3], [1, 0, 1], [3, 1, 0]]))
        assert exc.value.triple == (0, 2, 1)

    def test_nonsquare_rejected(self):
        with pytest.raises(ValueError):
            validate_metric(np.zeros((2, 3)))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            validate_metric(np.array([[0.0, np.inf], [np.inf, 0.0]]))

    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=2, max_value=12))
    @settings(max_examples=40, deadline=None)
    def test_euclidean_embeddings_always_validate(self, seed, n):
        rng = seeded(1, seed)
        space = euclidean_space(rng, n)
        d = space.dist
        # random-triple spot check on top of the constructor's full pass
        for _ in range(20):
            i, j, k = rng.integers(0, n, size=3)
            assert d[i, j] <= d[i, k] + d[k, j] + 1e-9


class TestGraphMetric:
    def test_path_distances(self):
        space = graph_metric(["a", "b", "c"], [(0, 1, 1.0), (1, 2, 1.0)])
        assert space.d(0, 2) == 2.0
        assert space.names == ["a", "b", "c"]

    def test_heavy_edge_bypassed(self):
        space = graph_metric(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)])
        assert space.d(0, 2) == 2.0

    def test_single_vertex(self):
        space = graph_metric(1, [])
        assert space.n_points == 1
        assert diameter(space) == 0.0

    def test_disconnected_rejected(self):
        with pytest.raises(Disconnected):
            graph_metric(3, [(0, 1, 1.0)])

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(NonpositiveWeight):
            graph_metric(2, [(0, 1, 0.0)])

    def test_edges_upper_bound_distances(self):
        rng = seeded(2)
        for _ in range(10):
            n = int(rng.integers(3, 9))
            edges = [(i, i + 1, float(rng.uniform(0.5, 2.0))) for i in range(n - 1)]
            for _ in range(2):
                u, v = rng.integers(0, n, size=2)
                if u != v:
                    edges.append((int(u), int(v), float(rng.uniform(0.5, 4.0))))
            space = graph_metric(n, edges)
            for u, v, w in edges:
                assert space.d(u, v) <= w + 1e-12

    def test_shortest_path_prefers_lowest_index(self):
        # two equal-length routes 0-1-3 and 0-2-3; canonical path takes vertex 1
        space = graph_metric(4, [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)])
        assert space.shortest_path(0, 3) == [0, 1, 3]

    def test_mesh_is_max_edge_weight(self):
        space = graph_metric(3, [(0, 1, 0.25), (1, 2, 0.75)])
        assert space.mesh() == 0.75


class TestDyadicInterval:
    def test_level_zero(self):
        space = dyadic_interval_space(0)
        assert space.n_points == 2
        assert space.d(0, 1) == 1.0

    def test_level_one_points(self):
        space = dyadic_interval_space(1)
        assert space.names == [0.0, 0.5, 1.0]
        assert space.base_point == 0

    def test_level_three_mesh(self):
        space = dyadic_interval_space(3)
        assert space.n_points == 9
        assert space.mesh() == 0.125

    def test_negative_level_rejected(self):
        with pytest.raises(ValueError):
            dyadic_interval_space(-1)


class TestDiameter:
    def test_subset(self, path5):
        assert diameter(path5) == 4.0
        assert diameter(path5, {1, 3}) == 2.0

    def test_singleton_subset(self, path5):
        assert diameter(path5, {2}) == 0.0

    def test_empty_subset(self, path5):
        with pytest.raises(EmptySubset):
            diameter(path5, set())


class TestCoveringNumber:
    def test_single_ball_above_diameter(self, path5):
        cert = covering_number(path5, 100.0)
        assert cert.k == 1

    def test_isolated_points_need_one_each(self):
        n = 6
        d = np.ones((n, n)) - np.eye(n)
        space = validate_metric(d)
        assert covering_number(space, 0.5).k == n

    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_dyadic_budget(self, level):
        space = dyadic_interval_space(level)
        eps = 2.0 ** -level
        greedy = covering_number(space, eps)
        exact = covering_number(space, eps, exact=True)
        assert exact.k <= greedy.k <= 2 ** (level - 1) + 1

    def test_certificate_covers_everything(self):
        rng = seeded(3)
        for _ in range(15):
            space = euclidean_space(rng, int(rng.integers(2, 14)))
            eps = float(rng.uniform(0.2, 3.0))
            cert = covering_number(space, eps)
            dmin = space.dist[:, cert.centers].min(axis=1)
            assert (dmin <= eps + 1e-12).all()

    def test_k_monotone_in_epsilon(self):
        rng = seeded(4)
        space = euclidean_space(rng, 12)
        ks = [covering_number(space, eps).k for eps in (4.0, 2.0, 1.0, 0.5, 0.25, 0.1)]
        assert ks == sorted(ks)

    def test_nonpositive_epsilon_rejected(self, path5):
        with pytest.raises(ValueError):
            covering_number(path5, 0.0)
