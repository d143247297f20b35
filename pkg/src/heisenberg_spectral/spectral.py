"""Joint spectral multipliers of (L, -iT) on cylindrical data.

On the fibre lambda the basis function phi_k^lambda is an eigenfunction of
the sublaplacian with eigenvalue 4 (2k + d) |lambda|, and -iT acts as
multiplication by -lambda.  Every operator here is therefore a function
m(k, lambda) and acts on coefficients by pointwise multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import mpmath
import numpy as np

from .errors import DomainError, GridRangeError, PoleError
from .field import LambdaGrid, SpectralCoefficients

__all__ = [
    "DimSpec",
    "SubLaplacian",
    "PureFractional",
    "Conformal",
    "SobolevJapaneseBracket",
    "PowerOfL",
    "AbsT",
    "Resolvent",
    "Propagator",
    "Product",
    "OperatorSpec",
    "ComparabilityRange",
    "eig_L",
    "multiplier",
    "multiplier_table",
    "apply",
    "dilate",
    "comparability_ratio",
    "comparability_range",
]

OVERFLOW_GUARD = 1e300


@dataclass(frozen=True)
class DimSpec:
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("d must be a positive integer")

    @property
    def Q(self) -> int:
        return 2 * self.d + 2


# ----------------------------------------------------------------------------- operator variants


@dataclass(frozen=True)
class SubLaplacian:
    pass


@dataclass(frozen=True)
class PureFractional:
    """L^s, the spectral power."""

    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise DomainError("PureFractional needs s > 0")


@dataclass(frozen=True)
class Conformal:
    """L_s = (2|T|)^s Gamma(L/(2|T|) + (1+s)/2) / Gamma(L/(2|T|) + (1-s)/2), for 0 < s < d+1."""

    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise DomainError("Conformal needs s > 0")


@dataclass(frozen=True)
class SobolevJapaneseBracket:
    """<L>^a = (1 + L^2)^(a/2)."""

    a: float


@dataclass(frozen=True)
class PowerOfL:
    """L^beta for any real beta (L is strictly positive on every fibre)."""

    beta: float


@dataclass(frozen=True)
class AbsT:
    """|T|^p, i.e. |lambda|^p."""

    power: float = 1.0


@dataclass(frozen=True)
class Resolvent:
    base: "OperatorSpec"
    sigma: complex

    def __post_init__(self):
        if complex(self.sigma).imag == 0:
            raise PoleError(f"resolvent requested on the real axis at sigma={self.sigma}")


@dataclass(frozen=True)
class Propagator:
    """exp(-i tau H)."""

    base: "OperatorSpec"
    tau: float


@dataclass(frozen=True)
class Product:
    factors: Tuple["OperatorSpec", ...]

    def __init__(self, factors):
        object.__setattr__(self, "factors", tuple(factors))


OperatorSpec = Union[
    SubLaplacian, PureFractional, Conformal, SobolevJapaneseBracket, PowerOfL, AbsT, Resolvent, Propagator, Product
]


# ----------------------------------------------------------------------------- multipliers


def eig_L(k, lam, d: int):
    """4 (2k + d) |lambda|, vectorised over k and lambda."""
    lam = np.asarray(lam, dtype=float)
    k = np.asarray(k)
    if np.any(lam == 0):
        raise DomainError("lambda must be nonzero")
    if np.any(k < 0) or d < 1:
        raise DomainError("need k >= 0 and d >= 1")
    val = 4.0 * (2.0 * k + d) * np.abs(lam)
    return val if val.ndim else float(val)


@lru_cache(maxsize=4096)
def _gamma_ratio_scalar(rho: float, s: float, scale_out: bool) -> float:
    # Gamma(rho + (1+s)/2) / Gamma(rho + (1-s)/2), optionally divided by rho^s.
    # Double-precision log-gamma differences lose ~1e-13 already at rho ~ 100,
    # so the ratio is formed at 30 digits; it depends on k only, hence the cache.
    with mpmath.workdps(30):
        a = mpmath.mpf(rho) + (1 - mpmath.mpf(s)) / 2
        val = mpmath.rf(a, s)
        if scale_out:
            val = val / mpmath.mpf(rho) ** s
        return float(val)


def _gamma_ratio(rho, s, scale_out=False):
    rho = np.asarray(rho, dtype=float)
    uniq, inv = np.unique(rho, return_inverse=True)
    vals = np.array([_gamma_ratio_scalar(float(r), float(s), scale_out) for r in uniq])
    return vals[inv].reshape(rho.shape)


def _conformal(s, k, lam, d):
    if not 0 < s < d + 1:
        raise DomainError(f"Conformal power needs 0 < s < d+1 = {d + 1}, got {s}")
    rho = 2.0 * (2.0 * np.asarray(k, dtype=float) + d)
    return (2.0 * np.abs(lam)) ** s * _gamma_ratio(rho, s)


def _multiplier(op, k, lam, d):
    if isinstance(op, SubLaplacian):
        return eig_L(k, lam, d)
    if isinstance(op, PureFractional):
        return eig_L(k, lam, d) ** op.s
    if isinstance(op, PowerOfL):
        return eig_L(k, lam, d) ** op.beta
    if isinstance(op, Conformal):
        return _conformal(op.s, k, lam, d)
    if isinstance(op, SobolevJapaneseBracket):
        return (1.0 + eig_L(k, lam, d) ** 2) ** (0.5 * op.a)
    if isinstance(op, AbsT):
        return np.abs(lam) ** op.power * np.ones_like(np.asarray(k, dtype=float))
    if isinstance(op, Resolvent):
        return 1.0 / (_multiplier(op.base, k, lam, d) - complex(op.sigma))
    if isinstance(op, Propagator):
        return np.exp(-1j * op.tau * _multiplier(op.base, k, lam, d))
    if isinstance(op, Product):
        out = np.ones(np.broadcast(np.asarray(k), np.asarray(lam)).shape, dtype=complex)
        for factor in op.factors:
            out = out * _multiplier(factor, k, lam, d)
        return out
    raise DomainError(f"unknown operator {op!r}")


def multiplier(op: OperatorSpec, k, lam, d: int):
    """m(k, lambda) for the operator, as a complex number or array."""
    if np.any(np.asarray(lam) == 0):
        raise DomainError("lambda must be nonzero")
    val = np.asarray(_multiplier(op, k, lam, d), dtype=complex)
    return val if val.ndim else complex(val)


def multiplier_table(op: OperatorSpec, kmax: int, grid: LambdaGrid, d: int) -> np.ndarray:
    """m(k, lambda_j) with shape (kmax + 1, grid size)."""
    k = np.arange(kmax + 1)[:, None]
    with np.errstate(over="ignore", invalid="ignore"):
        return np.asarray(_multiplier(op, k, grid.points[None, :], d), dtype=complex) * np.ones((kmax + 1, grid.size))


def apply(op: OperatorSpec, coeffs: SpectralCoefficients) -> SpectralCoefficients:
    """Diagonal action c[k, j] -> m(k, lambda_j) c[k, j].

    Multipliers applied in succession are recorded and re-multiplied onto the
    last non-diagonal data in a canonical order, so that the composition of
    diagonal operators is independent of the order they were applied in,
    bit for bit.
    """
    m = multiplier_table(op, coeffs.kmax, coeffs.grid, coeffs.d)
    support = coeffs.c != 0
    if np.any(np.abs(m[support]) > OVERFLOW_GUARD) or not np.all(np.isfinite(m[support])):
        raise DomainError(f"multiplier of {op!r} exceeds the overflow guard on the coefficient support")
    base = coeffs.c if coeffs.base is None else coeffs.base
    history = tuple(sorted(coeffs.history + (op,), key=repr))
    c = base.copy()
    for factor in history:
        c = c * multiplier_table(factor, coeffs.kmax, coeffs.grid, coeffs.d)
    return SpectralCoefficients(coeffs.d, coeffs.kmax, coeffs.grid, c, coeffs.residual, base, history)


# ----------------------------------------------------------------------------- dilations


def dilate(steps: int, coeffs: SpectralCoefficients) -> SpectralCoefficients:
    """Unitary dilation exp(i tau A) with exp(2 tau) = ratio**steps.

    f(z, t) -> exp(Q tau / 2) f(exp(tau) z, exp(2 tau) t) moves the coefficient at
    lambda to exp(2 tau) lambda and multiplies it by exp(-tau).
    """
    if steps == 0:
        return coeffs.with_c(coeffs.c.copy())
    g = coeffs.grid
    n = g.count_per_sign
    c = coeffs.c
    neg = c[:, :n][:, ::-1]  # magnitude order
    pos = c[:, n:]
    factor = g.ratio ** (-0.5 * steps)
    out = np.zeros_like(c)
    new_neg = np.zeros_like(neg)
    new_pos = np.zeros_like(pos)
    for src, dst in ((neg, new_neg), (pos, new_pos)):
        if steps > 0:
            if np.any(src[:, n - steps :] != 0):
                raise GridRangeError(f"dilation by {steps} steps pushes support past lambda_max")
            dst[:, steps:] = src[:, : n - steps]
        else:
            m = -steps
            if np.any(src[:, :m] != 0):
                raise GridRangeError(f"dilation by {steps} steps pushes support below lambda_min")
            dst[:, : n - m] = src[:, m:]
    out[:, :n] = new_neg[:, ::-1]
    out[:, n:] = new_pos
    return coeffs.with_c(factor * out)


def dilation_tau(steps: int, grid: LambdaGrid) -> float:
    """tau with exp(2 tau) = ratio**steps."""
    return 0.5 * steps * math.log(grid.ratio)


# ----------------------------------------------------------------------------- comparability


@dataclass(frozen=True)
class ComparabilityRange:
    c_s: float
    C_s: float
    stirling_defect: float

    def __post_init__(self):
        if not 0 < self.c_s <= self.C_s:
            raise DomainError("need 0 < c_s <= C_s")


def comparability_ratio(s: float, k, d: int):
    """L_s / L^s on the k-th Laguerre branch; independent of lambda."""
    rho = 2.0 * (2.0 * np.asarray(k, dtype=float) + d)
    out = _gamma_ratio(rho, s, scale_out=True)
    return out if out.ndim else float(out)


def comparability_range(s: float, d: int, k_max: int = 64, lambda_samples=None) -> ComparabilityRange:
    """Bounds c_s <= L_s / L^s <= C_s over the joint spectrum.

    The ratio is sampled for k <= k_max (and, if given, at the lambda samples,
    where it is constant); since it tends to 1 as k grows, 1 is folded into
    the range so the bounds hold for every k.  ``stirling_defect`` is
    |ratio - 1| at rho = 1e8.
    """
    if not 0 < s < d + 1:
        raise DomainError(f"Conformal power needs 0 < s < d+1, got s={s}")
    k = np.arange(k_max + 1)
    if lambda_samples is not None:
        lam = np.asarray(lambda_samples, dtype=float)
        ratio = np.abs(_conformal(s, k[:, None], lam[None, :], d) / eig_L(k[:, None], lam[None, :], d) ** s).ravel()
    else:
        ratio = comparability_ratio(s, k, d)
    defect = abs(_gamma_ratio_scalar(1e8, float(s), True) - 1.0)
    return ComparabilityRange(float(min(ratio.min(), 1.0)), float(max(ratio.max(), 1.0)), defect)
