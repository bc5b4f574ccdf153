"""Hyper-dual jets against hand values and the finite-difference oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finvar import (ConfigError, DegenerateVelocity, DomainError, EvalRequest,
                    evaluate, mixed_xy_hessian, x_gradient, y_jet2)
from finvar.autodiff import HyperDual, seed_variables, xy_jet2
from finvar.oracle import fd_derivative

from conftest import catalog_metrics, make_metric, sample_points

EUCLID = make_metric("euclidean", 2)
FUNK = make_metric("funk", 2)
KLEIN = make_metric("klein", 2)
CURVED = make_metric("curved", 2)


def test_euclid_value_and_gradient():
    jet = y_jet2(EUCLID, [7.0, -3.0], [3.0, 4.0])
    assert jet.value == pytest.approx(5.0, abs=1e-14)
    assert jet.grad == pytest.approx([0.6, 0.8], abs=1e-14)


def test_hessian_of_squared_euclid_is_2I():
    jet = y_jet2(lambda xs, ys: EUCLID(xs, ys) ** 2, [0.0, 0.0], [3.0, 4.0])
    assert np.abs(jet.hess - 2.0 * np.eye(2)).max() < 1e-12


def test_funk_jet_matches_finite_differences():
    x, y = [0.1, 0.0], [1.0, 0.0]
    jet = y_jet2(FUNK, x, y)
    fd_grad = fd_derivative(FUNK, x, y, "y_grad")
    fd_hess = fd_derivative(FUNK, x, y, "y_hess")
    assert np.abs(jet.grad - fd_grad).max() / np.abs(fd_grad).max() < 1e-6
    assert np.abs(jet.hess - fd_hess).max() / np.abs(fd_hess).max() < 1e-6


def test_x_gradient_euclid_vanishes():
    assert np.abs(x_gradient(EUCLID, [0.2, 0.5], [1.0, 2.0])).max() == 0.0


def test_x_gradient_klein_vanishes_at_origin():
    # the formula is even in x, so the x-gradient is odd and zero at x = 0
    assert np.abs(x_gradient(KLEIN, [0.0, 0.0], [1.3, -0.4])).max() < 1e-9


def test_x_gradient_curved_riemannian_hand_value():
    # F = sqrt(y1^2 + (1 + x1^2) y2^2); at x=(1,0), y=(0,1): dF/dx1 = 1/sqrt(2)
    gx = x_gradient(CURVED, [1.0, 0.0], [0.0, 1.0])
    assert gx[0] == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-13)
    assert gx[1] == pytest.approx(0.0, abs=1e-13)


def test_mixed_hessian_trivial_cases():
    assert np.abs(mixed_xy_hessian(EUCLID, [0.3, 0.1], [1.0, 2.0])).max() == 0.0
    # derivative of x1 -> x1^2 vanishes at the origin
    assert np.abs(mixed_xy_hessian(CURVED, [0.0, 0.0], [1.0, 1.0])).max() < 1e-14


def test_mixed_hessian_funk_matches_finite_differences():
    x, y = [0.2, 0.1], [1.0, 1.0]
    mixed = mixed_xy_hessian(FUNK, x, y)
    fd = fd_derivative(FUNK, x, y, "xy_hess")
    assert np.abs(mixed - fd).max() / np.abs(fd).max() < 1e-6


@pytest.mark.parametrize("metric", catalog_metrics(2) + catalog_metrics(3),
                         ids=lambda m: f"{m.name}-{m.dim}")
def test_catalog_hessian_matches_fd_on_random_points(metric):
    from finvar import ProjectivePair
    pts = sample_points(ProjectivePair(metric, metric), 100, seed=11)
    worst = 0.0
    for p in pts:
        jet = y_jet2(metric, p.x, p.y)
        fd = fd_derivative(metric, p.x, p.y, "y_hess")
        worst = max(worst, np.abs(jet.hess - fd).max() / np.abs(fd).max())
    assert worst < 1e-6


@pytest.mark.parametrize("metric", catalog_metrics(2),
                         ids=lambda m: m.name)
def test_chain_rule_square_assembly(metric):
    from finvar import ProjectivePair
    for p in sample_points(ProjectivePair(metric, metric), 25, seed=5):
        jet = y_jet2(metric, p.x, p.y)
        jet2 = y_jet2(lambda xs, ys: metric(xs, ys) ** 2, p.x, p.y)
        grad_ref = 2.0 * jet.value * jet.grad
        hess_ref = 2.0 * np.outer(jet.grad, jet.grad) + 2.0 * jet.value * jet.hess
        assert np.abs(jet2.grad - grad_ref).max() <= 1e-12 * np.abs(grad_ref).max()
        assert np.abs(jet2.hess - hess_ref).max() <= 1e-12 * np.abs(hess_ref).max()


@pytest.mark.parametrize("lam", [0.5, 2.0, 7.0])
@pytest.mark.parametrize("metric", catalog_metrics(3), ids=lambda m: m.name)
def test_positive_homogeneity_of_value(metric, lam):
    from finvar import ProjectivePair
    for p in sample_points(ProjectivePair(metric, metric), 10, seed=3):
        f1 = y_jet2(metric, p.x, p.y).value
        f2 = y_jet2(metric, p.x, lam * p.y).value
        assert abs(f2 - lam * f1) <= 1e-12 * abs(lam * f1)


@given(st.floats(min_value=0.1, max_value=10.0),
       st.floats(min_value=-0.5, max_value=0.5),
       st.floats(min_value=-2.0, max_value=2.0),
       st.floats(min_value=0.2, max_value=2.0))
@settings(max_examples=60, deadline=None)
def test_klein_jet_scaling_laws(y1, x1, y2, lam):
    # F 1-homogeneous: gradient is 0-homogeneous, Hessian is (-1)-homogeneous
    x = [x1, 0.1]
    y = [y1, y2 if abs(y2) > 1e-3 else 1.0]
    a = y_jet2(KLEIN, x, y)
    b = y_jet2(KLEIN, x, [lam * v for v in y])
    assert b.value == pytest.approx(lam * a.value, rel=1e-11)
    assert b.grad == pytest.approx(a.grad, rel=1e-10, abs=1e-12)
    assert b.hess * lam == pytest.approx(a.hess, rel=1e-9, abs=1e-11)


def test_affine_composition_applies_jacobian_rule():
    # jet of y -> F(x, A y + b) must be (A^T grad, A^T hess A)
    A = np.array([[1.2, -0.4], [0.3, 0.9]])
    b = np.array([0.05, -0.1])

    def composed(xs, ys):
        zs = [A[0, 0] * ys[0] + A[0, 1] * ys[1] + b[0],
              A[1, 0] * ys[0] + A[1, 1] * ys[1] + b[1]]
        return FUNK(xs, zs)

    x, y = [0.1, 0.2], [0.8, -0.3]
    inner = y_jet2(FUNK, x, A @ y + b)
    outer = y_jet2(composed, x, y)
    assert outer.value == pytest.approx(inner.value, rel=1e-14)
    assert np.abs(outer.grad - A.T @ inner.grad).max() < 1e-13
    assert np.abs(outer.hess - A.T @ inner.hess @ A).max() < 1e-13


def test_hyperdual_quotient_and_power_consistency():
    u, v = seed_variables([1.7, -0.6], 2)
    w = (u * u + 3.0) / (v * v + 2.0)
    w_ref = (u * u + 3.0) * ((v * v + 2.0) ** -1.0)
    assert w.val == pytest.approx(w_ref.val, rel=1e-14)
    assert np.abs(w.grad - w_ref.grad).max() < 1e-13
    assert np.abs(w.hess - w_ref.hess).max() < 1e-13


def test_hyperdual_hessian_is_symmetric_bitwise():
    u, v = seed_variables([0.9, 2.3], 2)
    w = (u * v + u.sqrt() * 3.1) / (v + 2.0)
    assert np.array_equal(w.hess, w.hess.T)


def test_degenerate_velocity_raises():
    with pytest.raises(DegenerateVelocity):
        y_jet2(EUCLID, [0.0, 0.0], [0.0, 0.0])
    with pytest.raises(DegenerateVelocity):
        HyperDual.constant(1e-30, 2).sqrt()


def test_domain_violation_raises():
    with pytest.raises(DomainError):
        y_jet2(KLEIN, [1.5, 0.0], [1.0, 0.0])


def test_eval_request_dispatch():
    with pytest.raises(ConfigError):
        EvalRequest(value=False)
    res = evaluate(FUNK, [0.1, 0.2], [1.0, -0.5],
                   EvalRequest(y_grad=True, y_hess=True))
    assert res.x_grad is None and res.xy_hess is None
    full = evaluate(FUNK, [0.1, 0.2], [1.0, -0.5],
                    EvalRequest(y_grad=True, y_hess=True, x_grad=True,
                                xy_hess=True))
    joint = xy_jet2(FUNK, [0.1, 0.2], [1.0, -0.5])
    assert np.allclose(full.y_grad, res.y_grad, rtol=0, atol=1e-15)
    assert np.allclose(full.y_hess, res.y_hess, rtol=0, atol=1e-15)
    assert np.allclose(full.x_grad, joint.grad[:2], rtol=0, atol=0)
    assert np.allclose(full.xy_hess, joint.hess[2:, :2], rtol=0, atol=0)
    value_only = evaluate(FUNK, [0.1, 0.2], [1.0, -0.5], EvalRequest())
    assert value_only.value == pytest.approx(full.value, rel=1e-15)
