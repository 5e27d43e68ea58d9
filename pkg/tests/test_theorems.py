import json

import numpy as np
import pytest

from curvlab import theorems
from curvlab.catalog import get_entry
from curvlab.curvature import compute_pack, connection_for, curvature_pack
from curvlab.errors import SingularMetricError
from curvlab.geometry import ConnectionChange, MetricField, WeylStructure, apply_change
from curvlab.theorems import (
    RESOLVED_CONVENTION,
    ResamplingExhausted,
    VerificationReport,
    calibrate_transformation_convention,
    coincidence_check,
    nurowski_contraction,
    random_metric,
    rng_for,
    sample_packs,
    schouten_law_residuals,
    schouten_transformation_check,
    trace_coefficients,
    trace_identity,
)


def pack(entry_id, point):
    return compute_pack(get_entry(entry_id).source(), np.asarray(point, dtype=float))


class TestReport:
    def test_le_verdict(self):
        r = VerificationReport("x", "m", "levi-civita", 1, 1e-8)
        r.add([0.0], 1e-9, 2.0)
        r.add([1.0], 3e-8, 2.0)
        assert r.point_passes() == [True, False]
        assert not r.verdict
        assert r.worst == pytest.approx(1.5e-8)

    def test_ge_fraction(self):
        r = VerificationReport("x", "m", "levi-civita", 1, 1e-5, comparison="ge", min_fraction=0.9)
        for k in range(10):
            r.add([k], 1.0 if k else 0.0)
        assert r.pass_fraction == pytest.approx(0.9) and r.verdict

    def test_empty_report_fails(self):
        assert not VerificationReport("x", "m", "none", 1, 1.0).verdict

    def test_serialisation_excludes_timing_by_default(self):
        r = VerificationReport("x", "m", "none", 3, 1e-8)
        r.add(np.array([0.5, 0.25]), 0.0)
        r.wall_time = 1.23
        d = r.to_dict()
        assert "wall_time" not in d and d["verdict"] == "pass" and d["seed"] == 3
        assert r.to_dict(include_timing=True)["wall_time"] == 1.23
        json.dumps(d)


class TestSampling:
    def test_rng_reproducible_and_label_sensitive(self):
        a = rng_for(42, "coincidence", "sphere4").uniform(size=5)
        b = rng_for(42, "coincidence", "sphere4").uniform(size=5)
        c = rng_for(42, "coincidence", "aniso4").uniform(size=5)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_resamples_singular_points(self):
        # sqrt(x1 - 1) is undefined on a third of the box
        metric = MetricField.diagonal(("x1", "x2"), ["1 + sqrt(x1 - 1)", "1"])
        drawn, rejected = sample_packs(metric, [[0.5, 2.0], [0.0, 1.0]], rng_for(0, "t"), 10)
        assert len(drawn) == 10 and rejected > 0
        assert all(p[0][0] > 1.0 for p in drawn)

    def test_exhaustion(self):
        metric = MetricField.diagonal(("x1", "x2"), ["log(x1)", "1"])
        with pytest.raises(ResamplingExhausted):
            sample_packs(metric, [[-2.0, -1.0], [0.0, 1.0]], rng_for(0, "t"), 1)

    def test_singular_metric_raises_directly(self):
        with pytest.raises(SingularMetricError):
            compute_pack(MetricField.diagonal(("x1", "x2"), ["x1", "1"]), np.array([0.0, 0.5]))


class TestCoincidence:
    @pytest.mark.parametrize("r", [3.0, 5.0, 10.0])
    def test_schwarzschild(self, r):
        res = coincidence_check(pack("schwarzschild", [1.0, r, 1.0, 2.0]))
        assert res.residual <= 1e-8 * res.scale and res.coincide

    @pytest.mark.parametrize("entry_id, point", [("sphere4", [0.3, -0.2, 0.6, 0.1]),
                                                 ("hyperbolic4", [0.2, -0.1, 0.15, 0.05])])
    def test_constant_curvature(self, entry_id, point):
        res = coincidence_check(pack(entry_id, point))
        assert res.residual <= 1e-9 * res.scale

    def test_anisotropic_separates(self):
        res = coincidence_check(pack("aniso4", [0.3, -0.5, 0.7, 0.1]))
        assert res.residual >= 1e3 * 1e-8 * res.scale and res.separated
        assert res.phi_norm >= 1e-5 * res.scale

    def test_weyl_nonclosed_separates_with_skew_ricci(self):
        res = coincidence_check(pack("weyl_nonclosed4", [0.3, -0.5, 0.7, 0.1]))
        assert res.separated and res.varphi_norm == pytest.approx(2.0)


class TestTraceIdentity:
    def test_n4_coefficients(self):
        rng = np.random.default_rng(0)
        g = random_metric(rng, 4)
        ti = trace_identity(rng.normal(size=(4, 4)), g, np.linalg.inv(g))
        assert ti.phi_coefficient == pytest.approx(4 / 3, abs=1e-12)
        assert ti.varphi_coefficient == pytest.approx(3 / 5, abs=1e-12)
        assert abs(ti.scalar_part) <= 1e-12 and ti.remainder <= 1e-12

    def test_n5_coefficients(self):
        rng = np.random.default_rng(1)
        g = random_metric(rng, 5, lorentzian=True)
        ti = trace_identity(rng.normal(size=(5, 5)), g, np.linalg.inv(g))
        assert ti.phi_coefficient == pytest.approx(5 / 4, abs=1e-12)
        assert ti.varphi_coefficient == pytest.approx(21 / 30, abs=1e-12)

    def test_pure_trace_no_difference(self):
        g = random_metric(np.random.default_rng(2), 4)
        ti = trace_identity(2.0 * g, g, np.linalg.inv(g))
        assert np.max(np.abs(ti.difference)) <= 1e-13
        assert ti.phi_coefficient is None and ti.varphi_coefficient is None

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_expected_values(self, n):
        assert trace_coefficients(n) == (n / (n - 1), (n * n - 4) / (n * (n + 1)))


class TestNurowski:
    def test_pure_trace_and_zero(self):
        g = np.eye(4)
        assert nurowski_contraction(3 * g, g, g)[1] == 0.0
        assert nurowski_contraction(np.zeros((4, 4)), g, g)[1] == 0.0

    def test_off_diagonal_pair(self):
        ric = np.zeros((4, 4))
        ric[0, 1] = ric[1, 0] = 1.0
        assert nurowski_contraction(ric, np.eye(4), np.eye(4))[1] > 0.1

    def test_equivalence_report(self):
        zero, margin = theorems.einstein_equivalence_check(seed=5, trials=30)
        assert zero.verdict and margin.verdict
        assert margin.details["min_margin"] > 0


class TestSchoutenLaw:
    def test_calibration_regression(self):
        for kind in ("projective", "conformal"):
            found = calibrate_transformation_convention(kind)
            assert (found["sign"], found["connection"]) == (1, "changed")
            assert (found["sign"], found["connection"]) == tuple(RESOLVED_CONVENTION[kind].values())
            others = [v for k, v in found["residuals"].items() if k != "+1/changed"]
            assert min(others) > 1e-3

    def test_zero_b(self):
        assert schouten_transformation_check(get_entry("sphere4").source(), "conformal", ("0",) * 4,
                                             np.array([0.1, 0.2, 0.3, 0.4])) == 0.0

    def test_flat_constant_b_projective(self):
        b = np.array([0.3, -0.2, 0.5, 0.1])
        base = get_entry("euclidean4").source()
        point = np.zeros(4)
        conn = connection_for(base, point)
        changed = curvature_pack(apply_change(conn, ConnectionChange("projective", tuple(repr(float(v)) for v in b))))
        # by hand: Gamma' = delta b + delta b, Ric' = (n-1) b b, so rho' - rho = b b
        np.testing.assert_allclose(changed.rho.values - curvature_pack(conn).rho.values, np.outer(b, b), atol=1e-15)
        # the law with the changed connection: nabla'_i b_j = -2 b_i b_j, plus b_i b_j
        assert schouten_transformation_check(base, "projective", tuple(repr(float(v)) for v in b), point) <= 1e-15

    def test_sphere_random_b_conformal(self):
        rng = rng_for(0, "law-test")
        b = theorems.random_one_form(rng, ("x1", "x2", "x3", "x4"), amplitude=0.3)
        point = np.array([0.2, -0.3, 0.1, 0.4])
        source = get_entry("sphere4").source()
        residuals, scale = schouten_law_residuals(source, "conformal", b, point)
        assert residuals[(1, "changed")] <= 1e-9 * scale

    def test_weyl_base(self):
        source = get_entry("weyl_nonclosed4").source()
        b = ("x2", "0.2", "x1*x3", "0")
        for kind in ("projective", "conformal"):
            assert schouten_transformation_check(source, kind, b, np.array([0.3, 0.1, -0.2, 0.4])) <= 1e-12


class TestSuites:
    def test_invariance_zero_b_bitwise(self):
        p = pack("schwarzschild", [0.0, 5.0, 1.2, 0.3])
        q = curvature_pack(apply_change(p.connection, ConnectionChange("conformal", ("0",) * 4)))
        np.testing.assert_array_equal(p.c.values, q.c.values)
        np.testing.assert_array_equal(p.w.values, q.w.values)

    def test_euclidean_projective_invariance(self):
        spec = get_entry("euclidean4")
        r = theorems.invariance_suite(spec.source(), "projective", 3, 5, spec.box(), "euclidean4")
        assert r.verdict and max(r.residuals) <= 1e-9

    def test_schwarzschild_conformal_invariance(self):
        spec = get_entry("schwarzschild")
        r = theorems.invariance_suite(spec.source(), "conformal", 3, 5, spec.box(), "schwarzschild")
        assert r.verdict and r.details["cross_effect_max"] > 0

    def test_coincidence_suite_separate(self):
        spec = get_entry("flrw4")
        main, defect = theorems.coincidence_suite(spec.source(), 1, 5, spec.box(), "flrw4", expect="separate")
        assert main.verdict and defect.verdict and main.comparison == "ge"

    def test_coincidence_suite_forward_fails_for_witness(self):
        spec = get_entry("aniso4")
        main = theorems.coincidence_suite(spec.source(), 1, 5, spec.box(), "aniso4")[0]
        assert not main.verdict

    def test_lowdim_generic_three_metric(self):
        spec = get_entry("aniso3")
        (rep,) = theorems.lowdim_check(spec.source(), 0, 5, spec.box(), "aniso3")
        assert rep.verdict and not rep.details["weyl_tensors_agree"]
        assert rep.details["min_w_over_scale"] >= 1e3 * theorems.LOWDIM_W3_TOL
        assert "disagree" in rep.details["verdict_text"]

    def test_lowdim_rejects_n4(self):
        spec = get_entry("sphere4")
        with pytest.raises(Exception):
            theorems.lowdim_check(spec.source(), 0, 2, spec.box())

    def test_bianchi_on_weyl_structure(self):
        ws = WeylStructure(get_entry("sphere4").metric_field(), ("x2", "0", "x1*x4", "0.1"))
        proj, conf = theorems.bianchi_suite(ws, 0, 3, [[-0.5, 0.5]] * 4, "custom")
        assert proj.verdict and conf.verdict and proj.connection == "weyl"
