"""First integrals of projectively related Finsler pairs.

Given a pair (F, F~) with inverse metric g^{ik} of F and angular metric
h~_{kj} of F~, the (1,1) tensor

    H^i_j = (F / F~) g^{ik} h~_{kj}

has rank n-1 with kernel spanned by the velocity. The coefficients f_alpha
of det(H + Lambda I) = sum_alpha f_alpha Lambda^alpha are constant along
geodesics of F whenever the pair is projectively related; f_n = 1 and the
constant term vanishes. Because every f_alpha is 0+-homogeneous in the
velocity, the same functions are conserved along the geodesics of every
metric in the projective class.

Closed forms computed here for cross-checking:

    f_1     = (F/F~)^(n+1) det g~ / det g
    f_{n-1} = Tr H
    mu      = (det g / det g~)^(1/(n+1))
    I_0     = mu^2 F~^2                       (Painleve-type)
    I_1     = mu^3 g^{ij}(g~_{ij} g~_{kl} - g~_{ik} g~_{jl}) y^k y^l
    K       = (det g~ / det g)^(1/(n+1)) g~^{ik} g_{kj}  (conformal Killing)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .dynamics import GeodesicTrajectory
from .errors import ConfigError, DegenerateAngularMetric, SignMismatch
from .metrics import MetricJet, ProjectivePair, TangentPoint, metric_jet

# |constant term| of det(H + Lambda I) must stay under this multiple of
# ||H||_F^n; a violation means the kernel property H y = 0 degraded.
Q0_RTOL = 1e-10


@dataclass(frozen=True)
class HTensor:
    """The rank-(n-1) tensor whose characteristic polynomial carries the
    first integrals."""

    H: np.ndarray

    @property
    def dim(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class FirstIntegralVector:
    """Coefficients f_1..f_n of det(H + Lambda I) and delta_alpha = f_alpha
    det g.

    ``f[alpha-1]`` is f_alpha; f_n is 1 identically. The delta coefficients
    transform like det g under coordinate changes and are kept only for
    cross-checks against the combinatorial oracle.
    """

    f: np.ndarray
    delta: np.ndarray

    @property
    def dim(self) -> int:
        return self.f.shape[0]


def _jets(pair: ProjectivePair, p: TangentPoint) -> tuple[MetricJet, MetricJet]:
    return metric_jet(pair.base, p), metric_jet(pair.comparison, p)


def build_H(pair: ProjectivePair, p: TangentPoint) -> HTensor:
    """Assemble H = (F/F~) g^{-1} h~ at ``p``."""
    jet, jet_t = _jets(pair, p)
    return HTensor(H=(jet.F / jet_t.F) * (jet.g_inv @ jet_t.h))


def charpoly_coefficients(M: np.ndarray) -> np.ndarray:
    """Coefficients of det(M + Lambda I) in increasing powers of Lambda.

    Faddeev-LeVerrier recursion applied to -M; exact rational structure, no
    complex arithmetic, adequate for the package's working range n <= 8.
    The leading coefficient is exactly 1.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0] if M.ndim == 2 else 0
    if M.ndim != 2 or M.shape != (n, n) or n < 2:
        raise ConfigError(f"charpoly needs a square matrix of size >= 2, "
                          f"got shape {M.shape}")
    A = -M
    coeffs = np.empty(n + 1)
    coeffs[n] = 1.0
    Mk = np.eye(n)
    for k in range(1, n + 1):
        AM = A @ Mk
        ck = -np.trace(AM) / k
        coeffs[n - k] = ck
        Mk = AM + ck * np.eye(n)
    return coeffs


def first_integrals(pair: ProjectivePair, p: TangentPoint) -> FirstIntegralVector:
    """First integrals f_1..f_n at ``p`` and their delta counterparts.

    The constant term of the characteristic polynomial is computed and
    checked against ~0 rather than assumed; a violation is reported as a
    degenerate angular metric since it means H lost its kernel.
    """
    jet, jet_t = _jets(pair, p)
    H = (jet.F / jet_t.F) * (jet.g_inv @ jet_t.h)
    coeffs = charpoly_coefficients(H)
    h_norm = float(np.linalg.norm(H))
    if abs(coeffs[0]) > Q0_RTOL * h_norm ** H.shape[0]:
        raise DegenerateAngularMetric(
            f"constant charpoly term {coeffs[0]:.3e} not negligible "
            f"against ||H||^n = {h_norm ** H.shape[0]:.3e}")
    f = coeffs[1:].copy()
    return FirstIntegralVector(f=f, delta=f * jet.det_g)


def f1_closed_form(pair: ProjectivePair, p: TangentPoint) -> float:
    """f_1 = (F/F~)^(n+1) det g~ / det g, bypassing the polynomial."""
    jet, jet_t = _jets(pair, p)
    n = pair.dim
    return (jet.F / jet_t.F) ** (n + 1) * jet_t.det_g / jet.det_g


def fn1_closed_form(pair: ProjectivePair, p: TangentPoint) -> float:
    """f_{n-1} = Tr H = (F/F~) g^{ij} h~_{ij}."""
    jet, jet_t = _jets(pair, p)
    return (jet.F / jet_t.F) * float(np.trace(jet.g_inv @ jet_t.h))


def _volume_ratio(det_g: float, det_g_t: float, n: int) -> float:
    """(det g / det g~)^(1/(n+1)), guarded against sign disagreement."""
    if det_g * det_g_t <= 0.0:
        raise SignMismatch(
            f"det g = {det_g:.3e} and det g~ = {det_g_t:.3e} have opposite "
            f"signs; volume ratio undefined as a real")
    return (abs(det_g) / abs(det_g_t)) ** (1.0 / (n + 1))


def mu(pair: ProjectivePair, p: TangentPoint) -> float:
    """Volume-density ratio mu = (det g / det g~)^(1/(n+1))."""
    jet, jet_t = _jets(pair, p)
    return _volume_ratio(jet.det_g, jet_t.det_g, pair.dim)


def painleve_I0(pair: ProjectivePair, p: TangentPoint) -> float:
    """Painleve-type integral I_0 = mu^2 F~^2 (equals F^2 / f_1^(2/(n+1)))."""
    jet, jet_t = _jets(pair, p)
    return _volume_ratio(jet.det_g, jet_t.det_g, pair.dim) ** 2 * jet_t.F ** 2


def tm_I1(pair: ProjectivePair, p: TangentPoint) -> float:
    """Quadratic-type integral I_1 = mu^3 g^{ij}(g~_{ij} g~_{kl} -
    g~_{ik} g~_{jl}) y^k y^l (equals f_{n-1} F~^3 mu^3 / F)."""
    jet, jet_t = _jets(pair, p)
    m3 = _volume_ratio(jet.det_g, jet_t.det_g, pair.dim) ** 3
    gty = jet_t.g @ p.y
    return m3 * (float(np.trace(jet.g_inv @ jet_t.g)) * float(p.y @ gty)
                 - float(gty @ jet.g_inv @ gty))


def sarlet_K(pair: ProjectivePair, p: TangentPoint) -> np.ndarray:
    """Special conformal Killing tensor K = (det g~/det g)^(1/(n+1)) g~^{-1} g.

    Only the tensor itself is exposed; the scalar integral it generates
    carries the same information as I_0.
    """
    jet, jet_t = _jets(pair, p)
    gt_inv, _ = linalg.inverse(jet_t.g)
    scale = 1.0 / _volume_ratio(jet.det_g, jet_t.det_g, pair.dim)
    return scale * (gt_inv @ jet.g)


def integrals_along(pair: ProjectivePair, traj: GeodesicTrajectory) -> np.ndarray:
    """f_1..f_n evaluated at every trajectory sample, shape (n_samples, n)."""
    return np.array([first_integrals(pair, TangentPoint(x, y)).f
                     for x, y in zip(traj.xs, traj.ys)])
