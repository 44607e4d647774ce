"""JSON/CSV/SVG writers: formats, round trips, byte stability."""

import json
import math

import numpy as np
import pytest

from wasserlim import DiscreteMeasure, graph_metric, validate_metric, wasserstein_p
from wasserlim.measures import Density
from wasserlim.serialization import (
    canonical_json,
    coupling_to_dict,
    density_from_dict,
    density_to_dict,
    format_float,
    load_measure,
    load_space,
    measure_from_dict,
    measure_to_dict,
    space_from_dict,
    space_to_dict,
    svg_line_chart,
    write_csv,
    write_json,
)
from conftest import euclidean_space, random_measure, seeded


class TestCanonicalJson:
    def test_plain_document(self):
        doc = {"a": 1, "b": [1.5, 2.0], "c": {"d": True, "e": None}}
        text = canonical_json(doc)
        assert json.loads(text) == {
            "a": 1,
            "b": [1.5, 2.0],
            "c": {"d": True, "e": None},
        }

    def test_float_digits_survive_round_trip(self):
        x = 1 / 3
        assert float(json.loads(canonical_json(x))) == x

    def test_insertion_order_kept(self):
        assert canonical_json({"z": 1, "a": 2}).index('"z"') < canonical_json(
            {"z": 1, "a": 2}
        ).index('"a"')

    def test_nonfinite_become_strings(self):
        assert json.loads(canonical_json(math.inf)) == "inf"
        assert json.loads(canonical_json(-math.inf)) == "-inf"
        assert json.loads(canonical_json(math.nan)) == "nan"

    def test_numpy_scalars_accepted(self):
        doc = {"n": np.int64(3), "x": np.float64(0.25)}
        assert json.loads(canonical_json(doc)) == {"n": 3, "x": 0.25}

    def test_unserializable_rejected(self):
        with pytest.raises(TypeError):
            canonical_json({"f": object()})

    def test_format_float_is_reparseable_exactly(self):
        rng = seeded(60)
        for _ in range(200):
            x = float(rng.uniform(-1e6, 1e6)) * 10.0 ** int(rng.integers(-12, 12))
            assert float(format_float(x)) == x


class TestSpaceDocuments:
    def test_metric_document_round_trip(self):
        space = validate_metric(
            np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.5], [2.0, 1.5, 0.0]]),
            base_point=1,
            names=("a", "b", "c"),
        )
        doc = space_to_dict(space)
        assert doc["points"] == ["a", "b", "c"]
        assert doc["base"] == 1
        assert "metric" in doc and "edges" not in doc
        back = space_from_dict(doc)
        assert np.array_equal(back.dist, space.dist)
        assert back.base_point == 1

    def test_edge_document_round_trip(self, path5):
        doc = space_to_dict(path5)
        assert "edges" in doc and "metric" not in doc
        back = space_from_dict(doc)
        assert np.array_equal(back.dist, path5.dist)
        assert back.geodesic_structure == path5.geodesic_structure

    def test_unnamed_points_get_indices(self, two_point):
        assert space_to_dict(two_point)["points"] == ["0", "1"]

    def test_missing_fields_rejected(self):
        with pytest.raises(ValueError):
            space_from_dict({"points": ["a"]})
        with pytest.raises(ValueError):
            space_from_dict({"metric": [[0.0]]})
        with pytest.raises(ValueError):
            space_from_dict([1, 2, 3])


class TestMeasureDocuments:
    def test_inline_round_trip(self, path5):
        mu = DiscreteMeasure(path5, np.array([0.5, 0.0, 0.25, 0.25, 0.0]))
        back = measure_from_dict(measure_to_dict(mu))
        assert np.array_equal(back.weights, mu.weights)
        assert np.array_equal(back.space.dist, path5.dist)

    def test_file_reference_resolved_relative(self, tmp_path, path5):
        write_json(tmp_path / "space.json", space_to_dict(path5))
        mu = DiscreteMeasure.dirac(path5, 2)
        write_json(tmp_path / "mu.json", measure_to_dict(mu, space_ref="space.json"))
        back = load_measure(tmp_path / "mu.json")
        assert np.array_equal(back.weights, mu.weights)

    def test_density_document_round_trip(self, path3):
        lam = DiscreteMeasure.uniform(path3)
        density = Density.create(lam, [1.5, 0.75, 0.75])
        back = density_from_dict(density_to_dict(density))
        assert np.allclose(back.values, density.values)
        assert back.mass == pytest.approx(density.mass)

    def test_malformed_measure(self):
        with pytest.raises(ValueError):
            measure_from_dict({"weights": [1.0]})


class TestCouplingDocument:
    def test_plan_lists_support_cells(self, path5):
        mu = DiscreteMeasure(path5, np.array([0.5, 0.5, 0.0, 0.0, 0.0]))
        nu = DiscreteMeasure(path5, np.array([0.0, 0.0, 0.0, 0.5, 0.5]))
        _, coupling = wasserstein_p(mu, nu, 2.0)
        doc = coupling_to_dict(coupling)
        assert doc["p"] == 2.0
        assert doc["cost"] == coupling.cost_p
        assert sum(m for _, _, m in doc["plan"]) == pytest.approx(1.0, abs=1e-12)
        for i, j, m in doc["plan"]:
            assert coupling.matrix[i, j] == m


class TestWriters:
    def test_write_json_is_byte_stable(self, tmp_path):
        rng = seeded(61)
        space = euclidean_space(rng, 5)
        mu = random_measure(rng, space)
        doc = measure_to_dict(mu)
        write_json(tmp_path / "a.json", doc)
        write_json(tmp_path / "b.json", doc)
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_csv_formatting(self, tmp_path):
        out = tmp_path / "t.csv"
        write_csv(out, ["index", "label", "value"], [[0, "x", 0.5], [1, "y", 1.0]])
        assert out.read_text() == "index,label,value\n0,x,0.5\n1,y,1\n"

    def test_svg_chart_structure(self):
        chart = svg_line_chart({"w2": [1.0, 0.5, 0.25]}, title="demo")
        assert chart.startswith("<svg")
        assert chart.rstrip().endswith("</svg>")
        assert "polyline" in chart
        assert "demo" in chart
        assert svg_line_chart({"w2": [1.0, 0.5]}) == svg_line_chart({"w2": [1.0, 0.5]})

    def test_svg_rejects_empty_series(self):
        with pytest.raises(ValueError):
            svg_line_chart({"w2": []})
