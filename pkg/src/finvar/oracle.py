"""Independent brute-force verifiers for the production code paths.

Everything here deliberately avoids the machinery it checks: characteristic
polynomials come from determinant interpolation (numpy determinants, not the
recursion in :mod:`finvar.integrals`), the delta coefficients from a direct
double sum over permutation pairs, derivatives from central finite
differences, and Riemannian spray values from the Christoffel formula.
Clarity over speed throughout; these run in tests, not in production loops.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (ConfigError, DomainError, OracleConditioning,
                     OracleScopeExceeded)
from .metrics import ProjectivePair, TangentPoint, metric_jet

FD_STEP_MIN = 1e-8
FD_STEP_MAX = 1e-3
VANDERMONDE_COND_MAX = 1e12
# (n!)^2 terms; beyond n=3 the sum is too slow to serve as a quick oracle.
PERMUTATION_CUTOFF = 3


@dataclass(frozen=True)
class OracleConfig:
    """Knobs for the brute-force checks."""

    fd_step: float = 1e-5
    nodes: tuple | None = None
    permutation_cutoff: int = PERMUTATION_CUTOFF

    def __post_init__(self):
        if not (FD_STEP_MIN <= self.fd_step <= FD_STEP_MAX):
            raise ConfigError(
                f"fd_step must lie in [{FD_STEP_MIN}, {FD_STEP_MAX}], "
                f"got {self.fd_step}")
        if self.nodes is not None and len(set(self.nodes)) != len(self.nodes):
            raise ConfigError("interpolation nodes must be pairwise distinct")


def charpoly_by_interpolation(M: np.ndarray,
                              nodes=None) -> np.ndarray:
    """Coefficients of det(M + Lambda I) via evaluation at n+1 nodes.

    With default nodes the polynomial is solved in a rescaled variable
    Lambda = s u at integer nodes u = 0..n with s = ||M||_inf, which keeps
    the Vandermonde system well conditioned regardless of the matrix scale.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0] if M.ndim == 2 else 0
    if M.ndim != 2 or M.shape != (n, n) or n < 2:
        raise ConfigError(f"expected a square matrix of size >= 2, "
                          f"got shape {M.shape}")
    eye = np.eye(n)
    if nodes is None:
        s = float(np.abs(M).max())
        if s == 0.0:
            s = 1.0
        u = np.arange(n + 1, dtype=float)
        V = np.vander(u, increasing=True)
        dets = np.array([np.linalg.det(M + (s * uk) * eye) for uk in u])
        q = np.linalg.solve(V, dets)
        return q / s ** np.arange(n + 1)
    nodes = np.asarray(nodes, dtype=float)
    if nodes.shape != (n + 1,):
        raise ConfigError(f"need exactly {n + 1} nodes, got {nodes.shape}")
    if len(set(nodes.tolist())) != n + 1:
        raise ConfigError("interpolation nodes must be pairwise distinct")
    V = np.vander(nodes, increasing=True)
    cond = np.linalg.cond(V)
    if cond > VANDERMONDE_COND_MAX:
        raise OracleConditioning(
            f"Vandermonde condition number {cond:.3e} exceeds "
            f"{VANDERMONDE_COND_MAX:.0e}")
    dets = np.array([np.linalg.det(M + lk * eye) for lk in nodes])
    return np.linalg.solve(V, dets)


def _perm_sign(perm: tuple) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def delta_alpha_combinatorial(pair: ProjectivePair, p: TangentPoint,
                              alpha: int,
                              config: OracleConfig = OracleConfig()) -> float:
    """delta_alpha by direct enumeration of the permutation-pair sum.

    The coefficient of Lambda^alpha in det((F/F~) h~ + Lambda g) equals

        (F/F~)^(n-alpha) / ((alpha-1)! (n-alpha)!) *
        sum over sigma1, sigma2 of sign(sigma1 sigma2)
            h[s1(1), s2(1)] ... h[s1(alpha-1), s2(alpha-1)]
            h~[s1(alpha), s2(alpha)] ... h~[s1(n-1), s2(n-1)]
            dF/dy[s1(n)] dF/dy[s2(n)]

    and must match f_alpha det g from the production path.
    """
    n = pair.dim
    if n > config.permutation_cutoff:
        raise OracleScopeExceeded(
            f"combinatorial sum limited to n <= {config.permutation_cutoff}, "
            f"got n = {n}")
    if not 1 <= alpha <= n:
        raise ConfigError(f"alpha must lie in 1..{n}, got {alpha}")
    jet = metric_jet(pair.base, p)
    jet_t = metric_jet(pair.comparison, p)
    h, h_t, b = jet.h, jet_t.h, jet.F_y
    perms = [(perm, _perm_sign(perm))
             for perm in itertools.permutations(range(n))]
    total = 0.0
    for s1, sg1 in perms:
        for s2, sg2 in perms:
            term = float(sg1 * sg2)
            for i in range(alpha - 1):
                term *= h[s1[i], s2[i]]
            for i in range(alpha - 1, n - 1):
                term *= h_t[s1[i], s2[i]]
            total += term * b[s1[n - 1]] * b[s2[n - 1]]
    prefactor = ((jet.F / jet_t.F) ** (n - alpha)
                 / (math.factorial(alpha - 1) * math.factorial(n - alpha)))
    return prefactor * total


def fd_derivative(f, x, y, which: str, step: float = 1e-5,
                  domain=None) -> np.ndarray | float:
    """Central finite-difference derivatives of a scalar field f(x, y).

    ``which`` selects ``value``, ``y_grad``, ``y_hess``, ``x_grad``, or
    ``xy_hess`` (rows: velocity index, columns: base index). Base-point
    perturbations must stay at least 2*step inside ``domain`` when one is
    given.

    Field evaluations run in extended precision (longdouble) so that the
    second differences at the default step are not swamped by rounding: in
    double precision the eps/step^2 floor alone sits near 2e-6.
    """
    if not (FD_STEP_MIN <= step <= FD_STEP_MAX):
        raise ConfigError(
            f"fd step must lie in [{FD_STEP_MIN}, {FD_STEP_MAX}], got {step}")
    x = np.asarray(x, dtype=np.longdouble)
    y = np.asarray(y, dtype=np.longdouble)
    step = np.longdouble(step)
    n = x.shape[0]

    def ev(xp, yp):
        return np.longdouble(f(list(xp), list(yp)))

    if which in ("x_grad", "xy_hess") and domain is not None:
        for j in range(n):
            for sgn in (-1.0, 1.0):
                probe = np.asarray(x + sgn * 2.0 * step * _unit(n, j),
                                   dtype=float)
                if not domain(probe):
                    raise DomainError(
                        f"point within 2*step of the domain boundary along "
                        f"axis {j}")

    if which == "value":
        return float(ev(x, y))
    if which == "y_grad":
        return _fd_grad(lambda yp: ev(x, yp), y, step)
    if which == "x_grad":
        return _fd_grad(lambda xp: ev(xp, y), x, step)
    if which == "y_hess":
        return _fd_hess(lambda yp: ev(x, yp), y, step)
    if which == "xy_hess":
        out = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                ei, ej = _unit(n, i), _unit(n, j)
                out[i, j] = (
                    ev(x + step * ej, y + step * ei)
                    - ev(x + step * ej, y - step * ei)
                    - ev(x - step * ej, y + step * ei)
                    + ev(x - step * ej, y - step * ei)
                ) / (4.0 * step * step)
        return out
    raise ConfigError(f"unknown derivative selector '{which}'")


def _unit(n: int, i: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def _fd_grad(f, v, step):
    n = v.shape[0]
    out = np.empty(n)
    for i in range(n):
        e = step * _unit(n, i)
        out[i] = (f(v + e) - f(v - e)) / (2.0 * step)
    return out


def _fd_hess(f, v, step):
    n = v.shape[0]
    out = np.empty((n, n))
    f0 = f(v)
    for i in range(n):
        ei = step * _unit(n, i)
        out[i, i] = (f(v + ei) - 2.0 * f0 + f(v - ei)) / (step * step)
        for j in range(i + 1, n):
            ej = step * _unit(n, j)
            out[i, j] = out[j, i] = (
                f(v + ei + ej) - f(v + ei - ej)
                - f(v - ei + ej) + f(v - ei - ej)
            ) / (4.0 * step * step)
    return out


def christoffel_oracle(matrix_field, x, step: float = 1e-5) -> np.ndarray:
    """Christoffel symbols Gamma^i_{jk} of a Riemannian matrix field at x.

    Metric derivatives come from central differences; for a quadratic metric
    sqrt(y^T A y) the spray must satisfy G^i = Gamma^i_{jk} y^j y^k / 2.
    """
    if not (FD_STEP_MIN <= step <= FD_STEP_MAX):
        raise ConfigError(
            f"fd step must lie in [{FD_STEP_MIN}, {FD_STEP_MAX}], got {step}")
    x = np.asarray(x, dtype=float)
    n = x.shape[0]

    def mat(xp):
        return np.array([[float(v) for v in row]
                         for row in matrix_field(list(xp))])

    A = mat(x)
    if not np.allclose(A, A.T, rtol=1e-12, atol=1e-12):
        raise DomainError("matrix field is not symmetric at x")
    if np.linalg.eigvalsh(A).min() <= 0.0:
        raise DomainError("matrix field is not positive definite at x")
    dA = np.empty((n, n, n))    # dA[k] = dA/dx^k
    for k in range(n):
        e = step * _unit(n, k)
        dA[k] = (mat(x + e) - mat(x - e)) / (2.0 * step)
    A_inv = np.linalg.inv(A)
    gamma = np.empty((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                gamma[i, j, k] = 0.5 * sum(
                    A_inv[i, m] * (dA[j][m, k] + dA[k][m, j] - dA[m][j, k])
                    for m in range(n))
    return gamma
