"""Explicit constants: generalized Dawson integrals, kappa, and the composite operator-norm bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .errors import DomainError, OptimizationError, ResolutionError

__all__ = [
    "KAPPA_CLOSED_LIMIT",
    "dawson",
    "KappaInput",
    "KappaResult",
    "kappa",
    "kappa_for",
    "remark27_bound",
    "radial_bound",
    "general_bound",
    "resolvent_bound",
    "stability_threshold",
    "gronwall_envelope",
    "hardy_bound",
    "LEMMA43_T_BOUND",
    "LEMMA43_RT_BOUND",
    "KATO_FACTOR",
    "kato_reference",
]

#: 2 (3 e^{1/4} - 2)^2, the closed-form upper bound for kappa(L, 1, 1).
KAPPA_CLOSED_LIMIT = 2.0 * (3.0 * math.exp(0.25) - 2.0) ** 2

LOG_B_RANGE = (-12.0, 4.0)

#: ||T f|| <= LEMMA43_T_BOUND ||L f|| and || |z| T f || <= LEMMA43_RT_BOUND ||L^{1/2} f||.
LEMMA43_T_BOUND = 0.5
LEMMA43_RT_BOUND = 0.5

#: Plancherel in tau turns sup ||A Im R(sigma) A*|| <= C into
#: int ||A exp(-i tau H) u||^2 d tau <= 2 C ||u||^2, and ||Im R|| <= ||R||.
KATO_FACTOR = 2.0


def _dawson_series(p, x, tol=1e-17):
    # int_0^x exp(tau^p) d tau = sum_n x^{np+1} / (n! (np+1)), used while x^p <= 1
    xp = x**p
    term_pow = x
    total = 0.0
    n = 0
    fact = 1.0
    while True:
        term = term_pow / (fact * (n * p + 1.0))
        total += term
        if term <= tol * total or n > 400:
            break
        n += 1
        fact *= n
        term_pow *= xp
    return math.exp(-xp) * total


def dawson(p: float, x: float, epsabs: float = 1e-13) -> float:
    """D(p, x) = exp(-x^p) int_0^x exp(tau^p) d tau.

    The prefactor is folded into the integrand, exp(tau^p - x^p) <= 1, so
    nothing overflows for large x^p.  For x^p <= 1 the Maclaurin series is
    summed instead of integrating.
    """
    if p < 1:
        raise DomainError(f"D(p, x) needs p >= 1, got p={p}")
    if x < 0:
        raise DomainError(f"D(p, x) needs x >= 0, got x={x}")
    if x == 0:
        return 0.0
    if x**p <= 1.0:
        return _dawson_series(p, x)
    xp = x**p

    def integrand(u):  # u = x - tau
        return math.exp((x - u) ** p - xp)

    # the mass sits in a boundary layer of width ~ 1 / (p x^{p-1}) at tau = x
    layer = min(x, 60.0 / (p * x ** (p - 1)))
    val, err = quad(integrand, 0.0, layer, epsabs=epsabs, epsrel=1e-13, limit=200)
    if layer < x:
        rest, err2 = quad(integrand, layer, x, epsabs=epsabs, epsrel=1e-13, limit=200)
        val += rest
        err += err2
    if err > 10 * max(epsabs, 1e-13 * abs(val)):
        raise ResolutionError(f"Dawson quadrature did not converge at p={p}, x={x}", value=err, gate=epsabs)
    return val


# ----------------------------------------------------------------------------- kappa


@dataclass(frozen=True)
class KappaInput:
    C1: float
    C2: float
    s: float
    mu: float
    K1: float = field(init=False)
    K2: float = field(init=False)
    K3: float = field(init=False)

    def __post_init__(self):
        if not (0 < self.C1 <= self.C2):
            raise DomainError(f"need 0 < C1 <= C2, got C1={self.C1}, C2={self.C2}")
        if not self.s > 0:
            raise DomainError("need s > 0")
        if not 0.5 < self.mu <= 1.0:
            raise DomainError(f"need 1/2 < mu <= 1, got mu={self.mu}")
        C1, C2, s, mu = self.C1, self.C2, self.s, self.mu
        object.__setattr__(self, "K1", (2.0 * C1**2 / C2) ** -0.5)
        object.__setattr__(self, "K2", math.sqrt(2.0 * s / C1) * max(s, 2.0 * math.exp(-(1.0 + 0.5 * s))))
        object.__setattr__(self, "K3", (2.0 - mu) / (mu - 0.5) * (2.0 * C1 * s) ** -0.5)


@dataclass(frozen=True)
class KappaResult:
    kappa: float
    b_star: float
    closed_bound: float
    b_closed: float


def _kappa_objective(inp: KappaInput, b: float, epsabs: float) -> float:
    q = inp.mu - 0.5
    bracket = (
        inp.K1 * b**-0.5
        + inp.K2 * math.sqrt(b) * dawson(2.0, math.sqrt(b), epsabs)
        + inp.K3 * b**q * dawson(1.0 / q, b**q, epsabs)
    )
    return math.exp(2.0 * b) * bracket**2


def _closed_objective(inp: KappaInput, b: float) -> float:
    val = inp.K1 * b**-0.5 * math.exp(b) + (inp.K2 + inp.K3 * b ** (2.0 * inp.mu - 2.0)) * math.expm1(b)
    return val**2


def _minimise_log_b(fun, n_scan: int, xtol: float, what: str):
    lo, hi = LOG_B_RANGE
    grid = np.linspace(lo, hi, n_scan)
    vals = np.array([fun(math.exp(v)) for v in grid])
    i = int(np.argmin(vals))
    if i == 0 or i == n_scan - 1:
        raise OptimizationError(f"{what}: minimum on the boundary of log b in [{lo}, {hi}]")
    # refine every interior local minimum of the scan and keep the best
    best_v, best_f = grid[i], vals[i]
    for m in range(1, n_scan - 1):
        if vals[m] <= vals[m - 1] and vals[m] <= vals[m + 1]:
            res = minimize_scalar(
                lambda v: fun(math.exp(v)),
                bracket=(grid[m - 1], grid[m], grid[m + 1]),
                method="golden",
                tol=xtol,
            )
            if res.fun < best_f:
                best_v, best_f = float(res.x), float(res.fun)
    if best_v <= lo + 1e-9 or best_v >= hi - 1e-9:
        raise OptimizationError(f"{what}: minimum on the boundary of log b in [{lo}, {hi}]")
    return math.exp(best_v), best_f


def kappa(inp: KappaInput, *, n_scan: int = 161, xtol: float = 1e-10, epsabs: float = 1e-13) -> KappaResult:
    """inf over b > 0 of the kappa objective, together with the closed-form bound.

    The infimum is searched in log b on [-12, 4] by a dense scan followed by
    golden-section refinement of each local minimum found by the scan.
    """
    b_star, k_val = _minimise_log_b(lambda b: _kappa_objective(inp, b, epsabs), n_scan, xtol, "kappa")
    b_closed, closed = _minimise_log_b(lambda b: _closed_objective(inp, b), n_scan, xtol, "closed bound")
    return KappaResult(float(k_val), float(b_star), float(closed), float(b_closed))


HClass = Literal["pure", "conformal"]


def kappa_for(H: HClass, s: float, mu: float, d: int = 1) -> KappaResult:
    """kappa for H = L^s (C1 = C2 = 1) or H = L_s (C1, C2 from the comparability range)."""
    if H == "pure":
        return kappa(KappaInput(1.0, 1.0, s, mu))
    if H == "conformal":
        from .spectral import comparability_range

        cr = comparability_range(s, d)
        return kappa(KappaInput(cr.c_s, cr.C_s, s, mu))
    raise DomainError(f"unknown operator class {H!r}")


# ----------------------------------------------------------------------------- composite bounds


def remark27_bound(which: str, d: int) -> float:
    """Explicit operator-norm bounds for s = mu = 1 and H = L.

    W1: ||w1 R w1||, W2: ||w2 R w2||, W3N and W4N: the w3 and w4 sandwiches with
    the <N>^{-1} factors.  The W4N factor enters unsquared, as published.
    """
    if which == "W1":
        if d < 1:
            raise DomainError("W1 bound needs d >= 1")
        factor = (5.0 + 3.0 / d) ** 2
    elif which in ("W2", "W3N", "W4N"):
        if d < 2:
            raise DomainError(f"{which} bound needs d >= 2")
        factor = {
            "W2": (5.0 + 4.0 / (d - 1)) ** 2,
            "W3N": (4.0 + 1.0 / d + 1.0 / (d - 1)) ** 2,
            "W4N": 3.0 + 1.0 / (d - 1),
        }[which]
    else:
        raise DomainError(f"unknown bound {which!r}")
    return KAPPA_CLOSED_LIMIT * factor


def radial_bound(which: str, d: int, s: float, mu: float, H: HClass = "pure") -> float:
    """kappa(H, s, mu) times the squared weighted-operator bound on cylindrical data.

    W3: (4 + 1/d)^{2 mu}; W4: (1 + sqrt(2) mu)^2 (3 + 2/d)^{2 mu}.
    """
    if d < 1:
        raise DomainError("need d >= 1")
    if not 0.5 < mu <= 1:
        raise DomainError("need 1/2 < mu <= 1")
    if which == "W3":
        factor = (4.0 + 1.0 / d) ** (2 * mu)
    elif which == "W4":
        factor = (1.0 + math.sqrt(2.0) * mu) ** 2 * (3.0 + 2.0 / d) ** (2 * mu)
    else:
        raise DomainError(f"unknown radial bound {which!r}")
    return kappa_for(H, s, mu, d).kappa * factor


def general_bound(case: str, d: int, s: float, H: HClass = "pure") -> float:
    """C(s) kappa(H, s, s) for the w1 / w2 cases with 1/2 < s <= 1."""
    if not 0.5 < s <= 1:
        raise DomainError("cases I and II need 1/2 < s <= 1")
    if case == "I":
        if d < 1:
            raise DomainError("case I needs d >= 1")
        base = 5.0 + 3.0 / d
    elif case == "II":
        if d < 2:
            raise DomainError("case II needs d >= 2")
        base = 5.0 + 4.0 / (d - 1)
    else:
        raise DomainError(f"unknown case {case!r}")
    c_s = base**2 if s == 1 else (1.0 + math.sqrt(2.0) * s) ** 2 * base ** (2 * s)
    return c_s * kappa_for(H, s, s, d).kappa


def resolvent_bound(case: str, d: int, s: float, mu: float, H: HClass = "pure") -> float:
    """The bound the harness compares ||G R(sigma) G* f|| / ||f|| against.

    H = L with s = 1 uses the published explicit bounds where they apply
    (cases I, II; cases III, IV with mu = 1 and d >= 2); cylindrical cases III
    and IV otherwise use :func:`radial_bound`, cases I and II
    :func:`general_bound`.
    """
    is_L = H == "pure" and s == 1
    if case in ("I", "II"):
        if is_L:
            return remark27_bound("W1" if case == "I" else "W2", d)
        return general_bound(case, d, s, H)
    if case in ("III", "IV"):
        if is_L and mu == 1 and d >= 2:
            return remark27_bound("W3N" if case == "III" else "W4N", d)
        return radial_bound("W3" if case == "III" else "W4", d, s, mu, H)
    raise DomainError(f"unknown case {case!r}")


def hardy_bound(which: str, d: int) -> float:
    """Hardy constants on H^d: 1/d for the w4 weight, 1/(d-1) for |z|^{-1}."""
    if which == "W4":
        if d < 1:
            raise DomainError("the w4 Hardy inequality needs d >= 1")
        return 1.0 / d
    if which == "InvZ":
        if d < 2:
            raise DomainError("the |z|^-1 Hardy inequality needs d >= 2")
        return 1.0 / (d - 1)
    raise DomainError(f"unknown Hardy weight {which!r}")


def kato_reference(resolvent_sup_bound: float) -> float:
    """Reference level for the smoothing integral derived from a resolvent bound."""
    return KATO_FACTOR * resolvent_sup_bound


def stability_threshold(case: str, d: int) -> float:
    """Largest admissible coupling: 1 / (2 (3e^{1/4} - 2)^2 (5 + 3/d)^2) or with 5 + 4/(d-1)."""
    if case == "I":
        return 1.0 / remark27_bound("W1", d)
    if case == "II":
        return 1.0 / remark27_bound("W2", d)
    raise DomainError(f"unknown stability case {case!r}")


# ----------------------------------------------------------------------------- Gronwall


def gronwall_envelope(A: float, u1: float, u2: Callable[[float], float], eps: float, b: float) -> float:
    """Upper bound for f(eps) when f(e) <= A + int_e^b (u1 f + u2 sqrt f) with constant u1.

    {sqrt(A) + 1/2 int_eps^b u2(r) exp(-u1 (b - r) / 2) dr}^2 exp(u1 (b - eps)).
    """
    if A < 0 or u1 < 0:
        raise DomainError("need A >= 0 and u1 >= 0")
    if not 0 < eps < b:
        raise DomainError("need 0 < eps < b")
    val, err = quad(lambda r: u2(r) * math.exp(-0.5 * u1 * (b - r)), eps, b, epsabs=1e-13, epsrel=1e-12, limit=200)
    if not math.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
        raise ResolutionError("Gronwall quadrature did not converge", value=err, gate=1e-8)
    return (math.sqrt(A) + 0.5 * val) ** 2 * math.exp(u1 * (b - eps))
