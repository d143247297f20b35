"""Weighted Gram matrices for sandwiched diagonal operators.

For a weight W(r, t) the quadratic form x -> || W synthesize(x) ||^2 is a
Hermitian form on coefficient space.  In the Euclidean coordinates
b[k, j] = sqrt(w_j / 2 pi) c[k, j] its matrix is

    M[(k, j), (m, l)] = sqrt(w_j w_l) / (2 pi)
                        * int phi_k^{lambda_j}(r) phi_m^{lambda_l}(r) What(r, lambda_j - lambda_l) dmu(r),

with What(r, Delta) = int_R W(r, t)^2 cos(Delta t) dt over the whole line.
Working with the full-line transform avoids truncating the slowly decaying
output of a resolvent in t.

The t-transforms are closed-form Bessel-K expressions for w2 and w4.  For
w1 and w3 four terms of the large-|t| expansion are subtracted in closed form
and the O(|t|^{-2p-4}) remainder is integrated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.special import gammaln, kve

from .errors import DomainError
from .field import LambdaGrid, PhysicalGrid
from .laguerre import basis_table
from .weights import WeightBase, WeightSpec

__all__ = ["PipelineConfig", "GramModel", "bessel_ft", "weight_ft", "gram_model"]


@dataclass(frozen=True)
class PipelineConfig:
    """Coarse discretisation used for weighted sandwiches.

    The (k, lambda) truncation is much smaller than the transform defaults so
    that dense Gram matrices stay affordable; the weight couples every pair
    of lambda-points.
    """

    kmax: int = 16
    ratio: float = 2.0**0.25
    lam_min: float = 2.0**-5
    lam_max: float = 2.0**5
    r_box: float = 40.0
    proj_r_box: float = 8.0
    proj_t_box: float = 6.0
    proj_dt: float = 0.25
    ft_t_max: float = 80.0
    ft_dt: float = 0.025

    def grid(self) -> LambdaGrid:
        return LambdaGrid.geometric(self.ratio, self.lam_min, self.lam_max)

    def radial_grid(self, d: int) -> PhysicalGrid:
        return PhysicalGrid.build(d, lam_max=self.lam_max, kmax=self.kmax, r_box=self.r_box, t_box=1.0, dt=1.0)

    def projection_grid(self, d: int) -> PhysicalGrid:
        """Grid for projecting weighted test fields, which are localised near the origin."""
        return PhysicalGrid.build(
            d,
            lam_max=self.lam_max,
            kmax=self.kmax,
            r_box=self.proj_r_box,
            t_box=self.proj_t_box,
            dt=self.proj_dt,
            t_rule="graded",
        )

    @classmethod
    def for_grid(cls, grid: LambdaGrid, kmax: int, **kwargs) -> "PipelineConfig":
        """Configuration reproducing an existing lambda-grid."""
        cfg = cls(kmax=kmax, ratio=grid.ratio, lam_min=grid.lam_min, lam_max=grid.lam_max, **kwargs)
        if not cfg.grid().same_as(grid):
            raise DomainError("lambda-grid cannot be reproduced from its ratio and range")
        return cfg


def bessel_ft(q: float, c, delta):
    """int_R (c^2 + t^2)^{-q} cos(delta t) dt for q > 1/2, c > 0."""
    c = np.asarray(c, dtype=float)
    delta = np.abs(np.asarray(delta, dtype=float))
    c, delta = np.broadcast_arrays(c, delta)
    out = np.empty(c.shape)
    zero = delta == 0
    out[zero] = math.exp(0.5 * math.log(math.pi) + gammaln(q - 0.5) - gammaln(q)) * c[zero] ** (1 - 2 * q)
    x = c[~zero] * delta[~zero]
    nu = q - 0.5
    log_pref = math.log(2.0) + 0.5 * math.log(math.pi) - gammaln(q) + nu * np.log(delta[~zero] / (2.0 * c[~zero]))
    with np.errstate(under="ignore"):
        out[~zero] = np.exp(log_pref - x) * kve(nu, x)
    return out


def _expansion_c(r):
    # For r >= 1, u = sqrt(r^4 + t^2) >= 1 and the 1/u expansion converges for all t (c = r^2);
    # for r < 1, c = 1 + r^2 keeps the subtracted terms bounded at t = 0.
    return np.where(r >= 1.0, r**2, 1.0 + r**2)


def _expansion_coeffs(p: float, e):
    """Coefficients a_n of (1 + u)^{-2p} = sum_n a_n v^{-2p-n} + O(v^{-2p-4}), u^2 = v^2 - e."""
    e = np.asarray(e, dtype=float)
    return [
        np.ones_like(e),
        np.full_like(e, -2.0 * p),
        p * e + p * (2 * p + 1),
        -p * (2 * p + 1) * e - (2 * p) * (2 * p + 1) * (2 * p + 2) / 6.0,
    ]


def _ft_remainder(r, p, delta, t_max, dt):
    # h - sum_n a_n v^{-2p-n} with h = (1 + sqrt(r^4 + t^2))^{-2p}, v = sqrt(c^2 + t^2).
    # The remainder is even and analytic in a strip of half-width ~min(r^2, 1), so the
    # uniform full-line trapezoid rule converges geometrically in 1/dt.
    t = np.arange(0.0, t_max + 0.5 * dt, dt)
    wt = np.full(t.shape, 2.0 * dt)
    wt[0] = dt
    c = _expansion_c(r)[:, None]
    coeffs = _expansion_coeffs(p, c**2 - r[:, None] ** 4)
    v = np.sqrt(c**2 + t[None, :] ** 2)
    rem = (1.0 + np.sqrt(r[:, None] ** 4 + t[None, :] ** 2)) ** (-2.0 * p)
    for n, a in enumerate(coeffs):
        rem = rem - a * v ** (-2.0 * p - n)
    out = np.empty((len(r), len(delta)))
    for start in range(0, len(delta), 256):
        dl = delta[start : start + 256]
        out[:, start : start + 256] = (rem * wt) @ np.cos(np.outer(t, dl))
    return out


def weight_ft(weight: WeightSpec, r, delta, t_max: float = 80.0, dt: float = 0.025) -> np.ndarray:
    """What(r, Delta) = int_R W(r, t)^2 cos(Delta t) dt on the tensor grid r x delta.

    For w1 and w3 the relative error is about 1e-8 once r^2 is well above
    ``dt``; below that the trapezoid rule under-resolves the bend of W at
    |t| ~ r^2 and the error grows to ~1e-4 at r = 0.01, where W itself is
    O(r^{2p}) small.
    """
    r = np.asarray(r, dtype=float)
    delta = np.abs(np.asarray(delta, dtype=float))
    p = weight.exponent
    base = WeightBase(weight.base)
    R, Dl = r[:, None], delta[None, :]
    if base is WeightBase.W4:
        if not p > 0.5:
            raise DomainError("the w4 transform needs exponent > 1/2")
        return R ** (2 * p) * bessel_ft(p, R**2, Dl)
    if base is WeightBase.W2:
        if not p > 0.5:
            raise DomainError("the w2 transform needs exponent > 1/2")
        return bessel_ft(p, np.sqrt(1.0 + R**2), Dl)
    if base in (WeightBase.W1, WeightBase.W3):
        if not p > 0.5:
            raise DomainError(f"the {base.value} transform needs exponent > 1/2")
        c = _expansion_c(R)
        coeffs = _expansion_coeffs(p, c**2 - R**4)
        h_hat = _ft_remainder(r, p, delta, t_max, dt)
        for n, a in enumerate(coeffs):
            h_hat = h_hat + a * bessel_ft(p + 0.5 * n, c, Dl)
        pref = R ** (2 * p) if base is WeightBase.W3 else (R**2 / (1.0 + R**2)) ** p
        return pref * h_hat
    raise DomainError(f"no Gram transform for weight {base.value}")


@dataclass(frozen=True, eq=False)
class GramModel:
    """Dense Gram matrix of a weight in Euclidean coefficient coordinates.

    Index order is j-major over the retained lambda-columns:
    a = i * (kmax + 1) + k for the column ``columns[i]``.
    """

    d: int
    weight: WeightSpec
    config: PipelineConfig
    grid: LambdaGrid
    columns: np.ndarray
    matrix: np.ndarray

    @property
    def kmax(self) -> int:
        return self.config.kmax

    def euclid(self, c: np.ndarray) -> np.ndarray:
        """Coefficients c[k, j] to Euclidean coordinates in j-major order."""
        scale = np.sqrt(self.grid.quad_weights[self.columns] / (2.0 * math.pi))
        return (np.asarray(c)[..., self.columns] * scale).swapaxes(-1, -2).reshape(*np.shape(c)[:-2], -1)

    def diag_euclid(self, m: np.ndarray) -> np.ndarray:
        """A multiplier table m[k, j] as a j-major vector."""
        return np.asarray(m)[:, self.columns].T.ravel()

    def quadratic(self, x: np.ndarray) -> float:
        return float(np.real(np.vdot(x, self.matrix @ x)))


@lru_cache(maxsize=16)
def gram_model(
    weight: WeightSpec, d: int, config: PipelineConfig = PipelineConfig(), columns: Optional[Tuple[int, ...]] = None
) -> GramModel:
    """Gram matrix of ``weight`` on the configuration's (k, lambda) truncation.

    ``columns`` restricts the lambda-index set, which is exact for data
    supported there.
    """
    grid = config.grid()
    cols = np.arange(grid.size) if columns is None else np.asarray(columns, dtype=int)
    if cols.size == 0 or cols.min() < 0 or cols.max() >= grid.size:
        raise DomainError("column indices out of range")
    pg = config.radial_grid(d)
    r, wr = pg.r_nodes, pg.r_weights
    n = cols.size
    K = config.kmax + 1
    mags = np.abs(grid.points[cols])
    phi = basis_table(config.kmax, d, mags, r).transpose(1, 0, 2)  # (n, K, n_r)
    lam = grid.points[cols]
    diff = np.abs(lam[:, None] - lam[None, :])
    uniq, inv = np.unique(diff, return_inverse=True)
    inv = inv.reshape(n, n)
    what = weight_ft(weight, r, uniq, config.ft_t_max, config.ft_dt)  # (n_r, n_uniq)
    scale = np.sqrt(grid.quad_weights[cols]) / math.sqrt(2.0 * math.pi)
    M = np.zeros((n, K, n, K))
    for j in range(n):
        left = phi[j] * wr[None, :]  # (K, n_r)
        rest = np.arange(j, n)
        wt = what[:, inv[j, rest]].T  # (n_rest, n_r)
        block = np.matmul(left[None, :, :] * wt[:, None, :], phi[rest].transpose(0, 2, 1))  # (n_rest, K, K)
        block *= (scale[j] * scale[rest])[:, None, None]
        M[j, :, rest, :] = block
        M[rest, :, j, :] = block.transpose(0, 2, 1)
    M = M.reshape(n * K, n * K)
    M = 0.5 * (M + M.T)  # the diagonal blocks are symmetric only up to rounding
    return GramModel(d, weight, config, grid, cols, M)
