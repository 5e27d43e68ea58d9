import json

import numpy as np
import pytest

from curvlab.catalog import CATALOG, catalog_ids, get_entry
from curvlab.curvature import compute_pack
from curvlab.errors import InputError
from curvlab.geometry import MetricField, WeylStructure
from curvlab.specfile import MetricSpec, load_spec


def base_doc(**overrides):
    doc = {
        "label": "test",
        "dimension": 2,
        "coordinates": ["u", "v"],
        "metric": [["1", "u*v"], [None, "2 + u^2"]],
        "sample_box": [[-0.5, 0.5], [-0.5, 0.5]],
    }
    doc.update(overrides)
    return doc


class TestValidation:
    def test_minimal(self):
        spec = MetricSpec.from_dict(base_doc())
        assert spec.n == 2 and spec.classification is None
        assert isinstance(spec.source(), MetricField)

    def test_lower_triangle_may_repeat_upper(self):
        MetricSpec.from_dict(base_doc(metric=[["1", "u*v"], ["u * v", "2"]]))

    @pytest.mark.parametrize(
        "overrides, message",
        [
            ({"metric": [["1", "u*v"], ["v*u", "2"]]}, "does not match"),
            ({"metric": [["1", None], [None, "2"]]}, "upper triangle"),
            ({"metric": [["1", "u*"], [None, "2"]]}, r"metric\[0\]\[1\]"),
            ({"metric": [["1", "w"], [None, "2"]]}, "unbound names"),
            ({"coordinates": ["u"]}, "coordinates"),
            ({"sample_box": [[0.5, 0.5], [-1, 1]]}, "lo < hi"),
            ({"dimension": 3}, "coordinates|metric|dimension"),
            ({"classification": "weird"}, "classification|invalid"),
            ({"extra": 1}, "invalid"),
            ({"weyl_one_form": ["0"]}, "weyl_one_form|invalid"),
            ({"weyl_one_form": ["sin(", "0"]}, r"weyl_one_form\[0\]"),
        ],
    )
    def test_rejects(self, overrides, message):
        with pytest.raises(InputError, match=message):
            MetricSpec.from_dict(base_doc(**overrides))

    def test_missing_required(self):
        doc = base_doc()
        del doc["sample_box"]
        with pytest.raises(InputError, match="sample_box"):
            MetricSpec.from_dict(doc)

    def test_params_and_override(self):
        spec = MetricSpec.from_dict(base_doc(metric=[["a", "0"], [None, "1"]], params={"a": 2}))
        assert spec.params == {"a": 2.0}
        assert spec.with_params(a=3).params == {"a": 3.0}
        with pytest.raises(InputError, match="unknown parameters"):
            spec.with_params(b=1)

    def test_weyl_form(self):
        spec = MetricSpec.from_dict(base_doc(weyl_one_form=["v", "0"]))
        assert isinstance(spec.source(), WeylStructure)
        zero = MetricSpec.from_dict(base_doc(weyl_one_form=["0", "0"]))
        assert isinstance(zero.source(), MetricField)


class TestFiles:
    def test_load(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(base_doc()))
        assert load_spec(path).coordinates == ("u", "v")

    def test_bad_json(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("{nope")
        with pytest.raises(InputError, match="not valid JSON"):
            load_spec(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError, match="cannot read"):
            load_spec(tmp_path / "absent.json")


class TestCatalog:
    def test_inventory(self):
        required = {"euclidean4", "sphere2", "sphere3", "sphere4", "hyperbolic4", "schwarzschild",
                    "desitter_like5", "aniso4", "flrw4", "weyl_nonclosed4"}
        assert required <= set(catalog_ids())

    def test_sphere4_text(self):
        spec = get_entry("sphere4")
        assert all(spec.metric[i][i] == "4/(1+x1^2+x2^2+x3^2+x4^2)^2" for i in range(4))

    def test_unknown(self):
        with pytest.raises(InputError, match="unknown catalog entry"):
            get_entry("nosuch")

    @pytest.mark.parametrize("entry_id", catalog_ids())
    def test_round_trip_and_compute(self, entry_id, tmp_path):
        spec = CATALOG[entry_id]
        path = tmp_path / f"{entry_id}.json"
        path.write_text(json.dumps(spec.to_dict()))
        again = load_spec(path)
        assert again.to_dict() == spec.to_dict()
        point = spec.box().mean(axis=1)
        a, b = compute_pack(spec.source(), point), compute_pack(again.source(), point)
        np.testing.assert_array_equal(a.riemann.values, b.riemann.values)

    @pytest.mark.parametrize("entry_id", catalog_ids())
    def test_classification_tags(self, entry_id):
        """Each tag is confirmed by the geometry at the box centre."""
        spec = CATALOG[entry_id]
        p = compute_pack(spec.source(), spec.box().mean(axis=1) + 0.01)
        scale = p.scale()
        ric = p.ricci.values
        einstein_defect = max(np.max(np.abs(p.phi.values)), np.max(np.abs(p.varphi.values)))
        tag = spec.classification
        if tag == "flat":
            assert np.max(np.abs(p.riemann.values)) == 0.0
        elif tag == "einstein":
            assert einstein_defect <= 1e-9 * scale and np.max(np.abs(ric)) >= 0.0
        elif tag == "non_einstein":
            assert np.max(np.abs(p.phi.values)) >= 1e-5 * scale
        else:
            assert np.max(np.abs(p.varphi.values)) >= 1e-5 * scale
