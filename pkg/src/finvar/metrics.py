"""Finsler metric catalog and per-point tensor assembly.

A metric is an evaluatable positively 1-homogeneous field F(x, y) together
with a domain predicate on the base point. The catalog provides:

====================  =======================================================
euclidean(n)          F = |y|
riemannian(A)         F = sqrt(y^T A(x) y) for a named matrix field A
randers(A, beta)      F = sqrt(y^T A(x) y) + beta_i(x) y^i
klein(n)              sqrt(|y|^2 (1-|x|^2) + <x,y>^2) / (1-|x|^2), |x| < 1
funk(n)               (sqrt((1-|x|^2)|y|^2 + <x,y>^2) + <x,y>) / (1-|x|^2)
scaled(base, c)       c * F_base, c > 0
====================  =======================================================

Klein and Funk live on the open unit ball and have straight chords as
geodesic paths, so euclidean/klein/funk are mutually projectively related;
a Randers metric with closed beta (here: beta = df for a named potential) is
projectively related to its underlying Riemannian alpha. Both facts are used
by the verification suites and are themselves re-checked dynamically.

Named matrix fields for ``riemannian``/``randers``:

* ``const_diag``  params [a_1..a_n], constant diag(a_1..a_n), a_i > 0
* ``curved_x1``   diag(1, 1 + (x^1)^2, 1, ...) - curved, not projectively
  flat; the standard negative control

Named 1-form choices for ``randers``:

* potential ``linear``    params c, f(x) = c . x, beta = c (closed)
* potential ``quadratic`` params c, f(x) = sum c_i (x^i)^2 / 2, beta_i = c_i x^i
* covector ``x2_dx1``     beta = (x^2, 0, ..., 0) - not closed; negative control
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg
from .autodiff import Jet2, gdot, gsqrt, scalar_value, xy_jet2
from .errors import (ConfigError, DegenerateAngularMetric, DegenerateVelocity,
                     DomainError)

# Points closer to a domain boundary than this margin are rejected to avoid
# catastrophic cancellation in terms like 1 - |x|^2.
EPS_DOM = 1e-9


@dataclass(frozen=True)
class TangentPoint:
    """Base point and nonzero velocity, the locus of every evaluation."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ConfigError(
                f"x and y must be vectors of equal length, got {self.x.shape} "
                f"and {self.y.shape}")
        if self.x.shape[0] < 2:
            raise ConfigError("dimension must be at least 2")
        if not np.any(self.y):
            raise DegenerateVelocity("velocity is exactly zero")

    @property
    def dim(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class FinslerMetric:
    """Evaluatable metric: closed-form field plus domain predicate.

    Calling the metric with generic scalars (floats or hyper-duals) first
    checks the domain of the underlying float base point, so every
    differentiation pass enforces the same boundary.
    """

    name: str
    dim: int
    evaluator: Callable
    domain: Callable[[np.ndarray], bool]
    reversible: bool = True
    descriptor: dict = field(default_factory=dict)
    matrix_field: Callable | None = None
    beta_closed: bool | None = None

    def __call__(self, xs, ys):
        xf = np.array([scalar_value(c) for c in xs])
        if not self.domain(xf):
            raise DomainError(f"{self.name}: base point {xf} outside domain")
        return self.evaluator(xs, ys)

    def value(self, p: TangentPoint) -> float:
        """F(x, y) at a tangent point."""
        if p.dim != self.dim:
            raise ConfigError(
                f"{self.name} has dimension {self.dim}, point has {p.dim}")
        return float(self(list(p.x), list(p.y)))


@dataclass(frozen=True)
class ProjectivePair:
    """Ordered pair (F, F~): geodesics of ``base`` carry the verification."""

    base: FinslerMetric
    comparison: FinslerMetric

    def __post_init__(self):
        if self.base.dim != self.comparison.dim:
            raise ConfigError(
                f"pair dimensions differ: {self.base.dim} vs "
                f"{self.comparison.dim}")

    @property
    def dim(self) -> int:
        return self.base.dim

    def in_domain(self, x: np.ndarray) -> bool:
        return self.base.domain(x) and self.comparison.domain(x)


@dataclass(frozen=True)
class MetricJet:
    """All derivative data of one metric at one tangent point.

    g is the velocity Hessian of F^2 / 2, h = F * (velocity Hessian of F) the
    angular metric, and the F2_* blocks are the x-derivatives of F^2 needed
    by the geodesic spray.
    """

    F: float
    F_y: np.ndarray
    F_x: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    h: np.ndarray
    det_g: float
    F2_yx: np.ndarray
    F2_x: np.ndarray

    @property
    def dim(self) -> int:
        return self.F_y.shape[0]


def metric_jet(metric: FinslerMetric, p: TangentPoint) -> MetricJet:
    """Assemble every tensor of ``metric`` at ``p`` from one joint AD pass."""
    if p.dim != metric.dim:
        raise ConfigError(
            f"{metric.name} has dimension {metric.dim}, point has {p.dim}")
    return _jet_arrays(metric, p.x, p.y)


# Metric values under this floor are treated as a collapsed velocity; jets
# would be dominated by cancellation noise.
F_FLOOR = 1e-13


def _jet_arrays(metric: FinslerMetric, x: np.ndarray, y: np.ndarray) -> MetricJet:
    n = x.shape[0]
    jet: Jet2 = xy_jet2(metric, x, y)
    F = jet.value
    if not np.isfinite(F) or F < F_FLOOR:
        raise DegenerateVelocity(
            f"{metric.name}: value {F} below the positivity floor")
    F_x = jet.grad[:n]
    F_y = jet.grad[n:]
    F_yy = jet.hess[n:, n:]
    F_yx = jet.hess[n:, :n]
    h = F * F_yy
    g = h + np.outer(F_y, F_y)
    g_inv, det_g = linalg.inverse(g)
    g_inv = 0.5 * (g_inv + g_inv.T)
    return MetricJet(
        F=F,
        F_y=F_y.copy(),
        F_x=F_x.copy(),
        g=g,
        g_inv=g_inv,
        h=h,
        det_g=det_g,
        F2_yx=2.0 * (np.outer(F_y, F_x) + F * F_yx),
        F2_x=2.0 * F * F_x,
    )


@dataclass(frozen=True)
class AngularRankReport:
    """Eigenvalue audit of the angular metric h (expected rank n-1)."""

    eigenvalues: np.ndarray
    threshold: float
    null_count: int

    @property
    def ok(self) -> bool:
        return self.null_count == 1


def angular_rank_check(jet: MetricJet) -> AngularRankReport:
    """Assert h has exactly one near-zero eigenvalue (kernel = velocity line)."""
    eigs = np.linalg.eigvalsh(jet.h)
    threshold = 1e-9 * np.abs(eigs).max()
    null_count = int(np.sum(np.abs(eigs) <= threshold))
    if null_count >= 2:
        raise DegenerateAngularMetric(
            f"angular metric has {null_count} near-null eigenvalues: {eigs}")
    return AngularRankReport(eigenvalues=eigs, threshold=threshold,
                             null_count=null_count)


# -- catalog ---------------------------------------------------------------


def _all_space(_x: np.ndarray) -> bool:
    return True


def _unit_ball(x: np.ndarray) -> bool:
    return float(np.dot(x, x)) < (1.0 - EPS_DOM) ** 2


def _euclidean_field(xs, ys):
    return gsqrt(gdot(ys, ys))


def _klein_field(xs, ys):
    xx = gdot(xs, xs)
    yy = gdot(ys, ys)
    xy = gdot(xs, ys)
    w = 1.0 - xx
    return gsqrt(yy * w + xy * xy) / w


def _funk_field(xs, ys):
    xx = gdot(xs, xs)
    yy = gdot(ys, ys)
    xy = gdot(xs, ys)
    w = 1.0 - xx
    return (gsqrt(yy * w + xy * xy) + xy) / w


def _quadratic_form(a_rows, ys):
    acc = None
    for i, row in enumerate(a_rows):
        term = ys[i] * gdot(row, ys)
        acc = term if acc is None else acc + term
    return acc


def _matrix_field(name: str, params, n: int) -> Callable:
    if name == "const_diag":
        if params is None or len(params) != n:
            raise ConfigError(f"const_diag needs {n} diagonal entries")
        diag = [float(v) for v in params]
        if any(v <= 0.0 for v in diag):
            raise ConfigError("const_diag entries must be positive")
        rows = [[diag[i] if i == j else 0.0 for j in range(n)]
                for i in range(n)]

        def const_field(xs):
            return rows

        return const_field
    if name == "curved_x1":
        if params:
            raise ConfigError("curved_x1 takes no parameters")

        def curved_field(xs):
            rows = [[1.0 if i == j else 0.0 for j in range(n)]
                    for i in range(n)]
            rows[1][1] = 1.0 + xs[0] * xs[0]
            return rows

        return curved_field
    raise ConfigError(f"unknown matrix field '{name}'")


def _beta_field(beta_desc: dict, n: int) -> tuple[Callable, bool]:
    """Covector field and whether it is closed (exact)."""
    if "potential" in beta_desc:
        pot = beta_desc["potential"]
        params = [float(v) for v in beta_desc.get("params", [])]
        if len(params) != n:
            raise ConfigError(f"potential '{pot}' needs {n} coefficients")
        if pot == "linear":
            return (lambda xs: list(params)), True
        if pot == "quadratic":
            return (lambda xs: [params[i] * xs[i] for i in range(n)]), True
        raise ConfigError(f"unknown potential '{pot}'")
    if "covector" in beta_desc:
        cov = beta_desc["covector"]
        if cov == "x2_dx1":
            if n < 2:
                raise ConfigError("x2_dx1 needs dimension >= 2")
            return (lambda xs: [xs[1]] + [0.0] * (n - 1)), False
        raise ConfigError(f"unknown covector field '{cov}'")
    raise ConfigError("randers beta needs a 'potential' or 'covector' entry")


def _randers_beta_norm2(a_field, beta, x: np.ndarray) -> float:
    a = np.array([[float(scalar_value(v)) for v in row]
                  for row in a_field(list(x))])
    b = np.array([float(scalar_value(v)) for v in beta(list(x))])
    try:
        return float(b @ np.linalg.solve(a, b))
    except np.linalg.LinAlgError:
        return float("inf")


def _require_dim(desc: dict) -> int:
    n = desc.get("dim")
    if not isinstance(n, int) or n < 2:
        raise ConfigError(f"descriptor needs integer 'dim' >= 2, got {n!r}")
    return n


def catalog_metric(desc: dict) -> FinslerMetric:
    """Build a catalog metric from a descriptor dictionary.

    Raises :class:`ConfigError` for unknown kinds, invalid parameters, or a
    Randers form with ||beta||_alpha >= 1 at a probe point.
    """
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError(f"metric descriptor needs a 'kind': {desc!r}")
    kind = desc["kind"]

    if kind == "euclidean":
        n = _require_dim(desc)
        return FinslerMetric("euclidean", n, _euclidean_field, _all_space,
                             descriptor=dict(desc))
    if kind == "klein":
        n = _require_dim(desc)
        return FinslerMetric("klein", n, _klein_field, _unit_ball,
                             descriptor=dict(desc))
    if kind == "funk":
        n = _require_dim(desc)
        return FinslerMetric("funk", n, _funk_field, _unit_ball,
                             reversible=False, descriptor=dict(desc))
    if kind == "riemannian":
        n = _require_dim(desc)
        a_field = _matrix_field(desc.get("field", "const_diag"),
                                desc.get("params"), n)

        def riemann_eval(xs, ys, _a=a_field):
            return gsqrt(_quadratic_form(_a(xs), ys))

        return FinslerMetric(f"riemannian[{desc.get('field')}]", n,
                             riemann_eval, _all_space, descriptor=dict(desc),
                             matrix_field=a_field)
    if kind == "randers":
        n = _require_dim(desc)
        a_field = _matrix_field(desc.get("alpha_field", "const_diag"),
                                desc.get("alpha_params", [1.0] * n), n)
        beta, closed = _beta_field(desc.get("beta", {}), n)
        probes = [np.zeros(n)]
        for i in range(n):
            e = np.zeros(n)
            e[i] = 0.5
            probes.extend([e, -e])
        for x in probes:
            if _randers_beta_norm2(a_field, beta, x) >= 1.0:
                raise ConfigError(
                    f"randers: ||beta||_alpha >= 1 at probe point {x}")

        def randers_domain(x, _a=a_field, _b=beta):
            return _randers_beta_norm2(_a, _b, x) < (1.0 - EPS_DOM) ** 2

        def randers_eval(xs, ys, _a=a_field, _b=beta):
            return gsqrt(_quadratic_form(_a(xs), ys)) + gdot(_b(xs), ys)

        return FinslerMetric(f"randers[{desc.get('beta')}]", n, randers_eval,
                             randers_domain, reversible=False,
                             descriptor=dict(desc), matrix_field=a_field,
                             beta_closed=closed)
    if kind == "scaled":
        factor = desc.get("factor")
        if not isinstance(factor, (int, float)) or factor <= 0:
            raise ConfigError(f"scaled needs factor > 0, got {factor!r}")
        base = catalog_metric(desc.get("base", {}))
        c = float(factor)

        def scaled_eval(xs, ys, _base=base.evaluator, _c=c):
            return _c * _base(xs, ys)

        return FinslerMetric(f"scaled[{c}]{base.name}", base.dim, scaled_eval,
                             base.domain, reversible=base.reversible,
                             descriptor=dict(desc),
                             matrix_field=base.matrix_field)
    raise ConfigError(f"unknown metric kind '{kind}'")
