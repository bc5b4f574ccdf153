"""Catalog formulas, MetricJet invariants, angular rank, domain handling."""

import numpy as np
import pytest

from finvar import (ConfigError, DegenerateAngularMetric, DegenerateVelocity,
                    DomainError, ProjectivePair, TangentPoint,
                    angular_rank_check, catalog_metric, metric_jet)
from finvar.metrics import AngularRankReport, MetricJet
from finvar.oracle import fd_derivative

from conftest import catalog_metrics, make_metric, sample_points


class TestCatalogValues:
    def test_euclidean(self):
        m = make_metric("euclidean", 2)
        assert m.value(TangentPoint([9.0, 9.0], [3.0, 4.0])) == 5.0

    def test_klein_at_origin(self):
        m = make_metric("klein", 2)
        assert m.value(TangentPoint([0.0, 0.0], [3.0, 4.0])) == pytest.approx(
            5.0, abs=1e-14)

    def test_klein_formula_off_origin(self):
        m = make_metric("klein", 2)
        x, y = np.array([0.3, -0.2]), np.array([1.0, 2.0])
        w = 1.0 - x @ x
        expect = np.sqrt((y @ y) * w + (x @ y) ** 2) / w
        assert m.value(TangentPoint(x, y)) == pytest.approx(expect, rel=1e-15)

    def test_funk_non_reversible(self):
        m = make_metric("funk", 2)
        assert not m.reversible
        # euclidean at the center regardless of direction
        assert m.value(TangentPoint([0.0, 0.0], [3.0, 4.0])) == pytest.approx(5.0)
        assert m.value(TangentPoint([0.0, 0.0], [-3.0, -4.0])) == pytest.approx(5.0)
        fwd = m.value(TangentPoint([0.5, 0.0], [1.0, 0.0]))
        back = m.value(TangentPoint([0.5, 0.0], [-1.0, 0.0]))
        assert fwd == pytest.approx(2.0, rel=1e-14)
        assert back == pytest.approx(2.0 / 3.0, rel=1e-14)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError):
            catalog_metric({"kind": "minkowski", "dim": 2})
        with pytest.raises(ConfigError):
            catalog_metric({"dim": 2})

    def test_randers_norm_guard(self):
        with pytest.raises(ConfigError):
            catalog_metric({"kind": "randers", "dim": 2,
                            "beta": {"potential": "linear",
                                     "params": [1.5, 0.0]}})

    def test_scaled_factor_guard(self):
        for bad in (0.0, -1.0, None):
            with pytest.raises(ConfigError):
                catalog_metric({"kind": "scaled", "factor": bad,
                                "base": {"kind": "euclidean", "dim": 2}})

    def test_const_diag_needs_positive_entries(self):
        with pytest.raises(ConfigError):
            catalog_metric({"kind": "riemannian", "dim": 2,
                            "field": "const_diag", "params": [1.0, -2.0]})


class TestTangentPoint:
    def test_zero_velocity(self):
        with pytest.raises(DegenerateVelocity):
            TangentPoint([0.0, 0.0], [0.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigError):
            TangentPoint([0.0, 0.0], [1.0, 0.0, 0.0])

    def test_dimension_floor(self):
        with pytest.raises(ConfigError):
            TangentPoint([0.0], [1.0])


class TestMetricJet:
    def test_euclid_tensors(self):
        jet = metric_jet(make_metric("euclidean", 3),
                         TangentPoint([1.0, 2.0, 3.0], [1.0, 0.0, 0.0]))
        assert np.abs(jet.g - np.eye(3)).max() < 1e-14
        yhat = np.array([1.0, 0.0, 0.0])
        assert np.abs(jet.h - (np.eye(3) - np.outer(yhat, yhat))).max() < 1e-14
        assert jet.det_g == pytest.approx(1.0, rel=1e-13)

    def test_scaled_jet_relations(self):
        base = make_metric("klein", 2)
        scaled = make_metric("scaled", 2, factor=2.0,
                             base={"kind": "klein", "dim": 2})
        p = TangentPoint([0.2, -0.1], [0.7, 0.4])
        j, js = metric_jet(base, p), metric_jet(scaled, p)
        assert np.abs(js.g - 4.0 * j.g).max() < 1e-12 * np.abs(j.g).max()
        assert np.abs(js.h - 4.0 * j.h).max() < 1e-12 * np.abs(j.h).max()
        assert js.det_g == pytest.approx(2.0 ** 4 * j.det_g, rel=1e-12)

    def test_klein_g_matches_fd_of_half_square_hessian(self):
        m = make_metric("klein", 2)
        x, y = [0.3, 0.0], [0.0, 1.0]
        jet = metric_jet(m, TangentPoint(x, y))
        fd_g = 0.5 * fd_derivative(lambda xs, ys: m(xs, ys) ** 2, x, y,
                                   "y_hess")
        assert np.abs(jet.g - fd_g).max() / np.abs(fd_g).max() < 1e-6

    @pytest.mark.parametrize("metric", catalog_metrics(2) + catalog_metrics(3),
                             ids=lambda m: f"{m.name}-{m.dim}")
    def test_invariants_on_random_points(self, metric):
        pts = sample_points(ProjectivePair(metric, metric), 200, seed=17)
        for p in pts:
            jet = metric_jet(metric, p)
            scale = np.abs(jet.g).max()
            assert np.abs(jet.g - jet.h - np.outer(jet.F_y, jet.F_y)).max() \
                <= 1e-12 * scale
            assert np.abs(jet.h @ p.y).max() \
                <= 1e-10 * np.abs(jet.h).max() * np.linalg.norm(p.y)
            euler = jet.g @ p.y - jet.F * jet.F_y
            assert np.abs(euler).max() <= 1e-10 * jet.F * np.abs(jet.F_y).max()
            assert np.abs(jet.g @ jet.g_inv - np.eye(p.dim)).max() <= 1e-10
            assert jet.det_g != 0.0

    @pytest.mark.parametrize("lam", [0.5, 2.0])
    def test_g_and_h_zero_homogeneous(self, lam):
        for metric in catalog_metrics(2):
            for p in sample_points(ProjectivePair(metric, metric), 20, seed=23):
                a = metric_jet(metric, p)
                b = metric_jet(metric, TangentPoint(p.x, lam * p.y))
                assert np.abs(a.g - b.g).max() <= 1e-10 * np.abs(a.g).max()
                assert np.abs(a.h - b.h).max() <= 1e-10 * np.abs(a.h).max()

    def test_riemannian_constant_matrix_reproduced(self):
        A = np.diag([2.0, 3.0, 4.0])
        m = catalog_metric({"kind": "riemannian", "dim": 3,
                            "field": "const_diag", "params": [2.0, 3.0, 4.0]})
        for p in sample_points(ProjectivePair(m, m), 30, seed=29):
            jet = metric_jet(m, p)
            assert np.abs(jet.g - A).max() <= 1e-10 * A.max()

    def test_domain_margin(self):
        m = make_metric("klein", 2)
        with pytest.raises(DomainError):
            metric_jet(m, TangentPoint([1.2, 0.0], [1.0, 0.0]))
        with pytest.raises(DomainError):
            # inside the ball but within the 1e-9 safety margin
            metric_jet(m, TangentPoint([1.0 - 1e-10, 0.0], [1.0, 0.0]))

    def test_rank_one_field_is_singular(self):
        from finvar import SingularMetric
        from finvar.autodiff import gsqrt
        from finvar.metrics import FinslerMetric
        # F^2 = (y1 + y2)^2 has a rank-one velocity Hessian
        degenerate = FinslerMetric(
            "rank-one", 2,
            lambda xs, ys: gsqrt((ys[0] + ys[1]) ** 2),
            lambda x: True)
        with pytest.raises(SingularMetric):
            metric_jet(degenerate, TangentPoint([0.0, 0.0], [1.0, 0.5]))

    def test_value_floor_rejected(self):
        m = make_metric("euclidean", 2)
        with pytest.raises(DegenerateVelocity):
            metric_jet(m, TangentPoint([0.0, 0.0], [1e-300, 0.0]))


class TestAngularRank:
    def test_euclid_projector_spectrum(self):
        jet = metric_jet(make_metric("euclidean", 3),
                         TangentPoint([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]))
        rep = angular_rank_check(jet)
        assert rep.ok and rep.null_count == 1
        assert np.sort(rep.eigenvalues) == pytest.approx([0.0, 1.0, 1.0],
                                                         abs=1e-12)

    def test_randers_rank_on_random_points(self):
        m = catalog_metric({"kind": "randers", "dim": 3,
                            "beta": {"potential": "quadratic",
                                     "params": [0.4, 0.2, 0.1]}})
        for p in sample_points(ProjectivePair(m, m), 25, seed=31):
            rep = angular_rank_check(metric_jet(m, p))
            assert rep.ok
            # independent eigen-decomposition of h agrees on the null count
            eigs = np.linalg.eigvalsh(metric_jet(m, p).h)
            assert np.sum(np.abs(eigs) <= 1e-9 * np.abs(eigs).max()) == 1

    def test_scaled_eigenvalues_scale_quadratically(self):
        base = make_metric("funk", 2)
        scaled = make_metric("scaled", 2, factor=2.0,
                             base={"kind": "funk", "dim": 2})
        p = TangentPoint([0.1, 0.2], [1.0, -0.3])
        a = angular_rank_check(metric_jet(base, p)).eigenvalues
        b = angular_rank_check(metric_jet(scaled, p)).eigenvalues
        assert np.sort(b) == pytest.approx(4.0 * np.sort(a), rel=1e-10)

    def test_rank_deficit_rejected(self):
        jet = metric_jet(make_metric("euclidean", 2),
                         TangentPoint([0.0, 0.0], [1.0, 0.0]))
        broken = MetricJet(F=jet.F, F_y=jet.F_y, F_x=jet.F_x, g=jet.g,
                           g_inv=jet.g_inv, h=np.zeros((2, 2)),
                           det_g=jet.det_g, F2_yx=jet.F2_yx, F2_x=jet.F2_x)
        with pytest.raises(DegenerateAngularMetric):
            angular_rank_check(broken)


def test_pair_dimension_check():
    with pytest.raises(ConfigError):
        ProjectivePair(make_metric("euclidean", 2), make_metric("klein", 3))


def test_angular_report_type():
    jet = metric_jet(make_metric("klein", 2),
                     TangentPoint([0.1, 0.1], [1.0, 0.5]))
    rep = angular_rank_check(jet)
    assert isinstance(rep, AngularRankReport)
    assert rep.eigenvalues.shape == (2,)
