"""Scaled Laguerre functions of type (d-1) and Gauss-Laguerre rules.

The radial basis on the lambda-fibre is

    phi_k(r) = n_{k,d,lambda} * L_k^{d-1}(2|lambda| r^2) * exp(-|lambda| r^2),

orthonormal for the measure Omega_{2d-1} r^{2d-1} dr on (0, inf), where
Omega_{2d-1} = 2 pi^d / Gamma(d) is the area of the unit sphere in R^{2d}.
These are the cylindrical eigenfunctions of the sublaplacian built from
X_j = d/dx_j + 2 y_j d/dt, Y_j = d/dy_j - 2 x_j d/dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.special import gammaln

from .errors import DomainError, ResolutionError

__all__ = [
    "QuadRule",
    "BasisParams",
    "laguerre_poly",
    "laguerre_table",
    "sphere_area",
    "basis_norm",
    "basis_eval",
    "basis_table",
    "gauss_laguerre",
    "radial_gauss_rule",
]


@dataclass(frozen=True)
class BasisParams:
    k: int
    d: int
    lam: float

    def __post_init__(self):
        if self.k < 0 or self.d < 1:
            raise DomainError(f"need k >= 0 and d >= 1, got k={self.k}, d={self.d}")
        if self.lam == 0:
            raise DomainError("lambda must be nonzero")

    @property
    def alpha(self) -> int:
        return self.d - 1


@dataclass(frozen=True)
class QuadRule:
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.nodes)

    def integrate(self, values) -> float:
        return float(np.sum(self.weights * np.asarray(values)))


def _check_alpha(alpha):
    if alpha <= -1:
        raise DomainError(f"Laguerre type alpha must exceed -1, got {alpha}")


def laguerre_poly(k: int, alpha: float, x):
    """Generalized Laguerre polynomial L_k^alpha(x) by the three-term recurrence."""
    _check_alpha(alpha)
    if k < 0:
        raise DomainError("k must be nonnegative")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if k == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = 1.0 + alpha - x
    for n in range(1, k):
        p_prev, p = p, ((2 * n + 1 + alpha - x) * p - (n + alpha) * p_prev) / (n + 1)
    return p if p.ndim else float(p)


def laguerre_table(kmax: int, alpha: float, x) -> np.ndarray:
    """All L_k^alpha(x) for k = 0..kmax, stacked along a new leading axis."""
    _check_alpha(alpha)
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 1.0 + alpha - x
    for n in range(1, kmax):
        out[n + 1] = ((2 * n + 1 + alpha - x) * out[n] - (n + alpha) * out[n - 1]) / (n + 1)
    return out


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere S^{2d-1} in R^{2d}."""
    return 2.0 * math.pi**d / math.gamma(d)


def _log_norm(k, d, lam):
    # log n_{k,d,lam}; from u = 2|lam| r^2 and the Laguerre orthogonality integral
    a = abs(lam)
    log_sq = math.log(sphere_area(d) / 2.0) - d * math.log(2.0 * a) + gammaln(k + d) - gammaln(k + 1)
    return -0.5 * log_sq


def basis_norm(k: int, d: int, lam: float) -> float:
    BasisParams(k, d, lam)
    return math.exp(_log_norm(k, d, lam))


def basis_eval(k: int, d: int, lam: float, r):
    BasisParams(k, d, lam)
    r = np.asarray(r, dtype=float)
    a = abs(lam)
    val = basis_norm(k, d, lam) * laguerre_poly(k, d - 1, 2.0 * a * r**2) * np.exp(-a * r**2)
    return val if np.ndim(val) else float(val)


def basis_table(kmax: int, d: int, lams, r) -> np.ndarray:
    """Table phi_k^{lam_j}(r_i) with shape (kmax+1, len(lams), len(r))."""
    lams = np.abs(np.asarray(lams, dtype=float))
    if np.any(lams == 0):
        raise DomainError("lambda must be nonzero")
    r = np.asarray(r, dtype=float)
    u = 2.0 * lams[:, None] * r[None, :] ** 2
    tab = laguerre_table(kmax, d - 1, u)
    norms = np.array([[math.exp(_log_norm(k, d, lam)) for lam in lams] for k in range(kmax + 1)])
    tab *= norms[:, :, None]
    tab *= np.exp(-0.5 * u)[None]
    return tab


def _golub_welsch_nodes(n, alpha):
    i = np.arange(n, dtype=float)
    diag = 2.0 * i + alpha + 1.0
    j = np.arange(1, n, dtype=float)
    off = np.sqrt(j * (j + alpha))
    try:
        nodes = eigh_tridiagonal(diag, off, eigvals_only=True)
    except LinAlgError as exc:
        raise ResolutionError(f"Golub-Welsch eigensolve failed for n={n}") from exc
    return np.sort(nodes)


def _scaled_christoffel(n, alpha, x):
    # 1 / sum_{k<n} (p_k(x) e^{-x/2})^2 for the orthonormal Laguerre polynomials p_k;
    # this is exp(x) times the Gauss weight, evaluated without forming exp(x).
    q_prev = np.zeros_like(x)
    q = np.exp(-0.5 * x - 0.5 * gammaln(alpha + 1.0))
    acc = q**2
    for k in range(n - 1):
        a_k = 2.0 * k + alpha + 1.0
        b_k = math.sqrt(k * (k + alpha)) if k else 0.0
        b_next = math.sqrt((k + 1.0) * (k + 1.0 + alpha))
        q_prev, q = q, ((x - a_k) * q - b_k * q_prev) / b_next
        acc += q**2
    return 1.0 / acc


def gauss_laguerre(n: int, alpha: float) -> QuadRule:
    """n-point Gauss rule for the weight exp(-u) u^alpha on (0, inf).

    Nodes come from the Golub-Welsch eigenvalue problem; weights from the
    Christoffel function, which keeps tiny weights accurate in relative terms.
    """
    _check_alpha(alpha)
    if n < 1:
        raise DomainError("rule size must be positive")
    nodes = _golub_welsch_nodes(n, alpha)
    weights = _scaled_christoffel(n, alpha, nodes) * np.exp(-nodes)
    return QuadRule(nodes, weights)


def radial_gauss_rule(n: int, d: int, lam: float) -> QuadRule:
    """Nodes in r and weights for the radial measure, exact on exp(-2|lam| r^2) * poly(r^2).

    Integrands of the form phi_k * phi_m are integrated exactly while k + m <= 2n - 1.
    """
    BasisParams(0, d, lam)
    _check_alpha(d - 1)
    a = abs(lam)
    nodes = _golub_welsch_nodes(n, d - 1)
    r = np.sqrt(nodes / (2.0 * a))
    w = 0.5 * sphere_area(d) * (2.0 * a) ** (-d) * _scaled_christoffel(n, d - 1, nodes)
    return QuadRule(r, w)
