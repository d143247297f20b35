"""Cylindrical functions on H^d in the Fourier-Laguerre representation.

A function f(r, t) with r = |z| is stored by its coefficients c[k, j] on a
sign-symmetric geometric lambda-grid, with

    f(r, t) = (2 pi)^-1 sum_j w_j exp(-i lambda_j t) sum_k c[k, j] phi_k^{lambda_j}(r),
    c[k, j] = < f^{lambda_j}, phi_k^{lambda_j} >,   f^lambda(r) = int f(r, t) exp(i lambda t) dt.

Physical space is only ever derived from coefficients or from closed-form
closures; quadrature grids live in :class:`PhysicalGrid`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError, ResolutionError
from .laguerre import basis_norm, basis_table, sphere_area
from .weights import WeightSpec, weight_eval

__all__ = [
    "LambdaGrid",
    "SpectralCoefficients",
    "PhysicalGrid",
    "ClosureField",
    "NormResult",
    "synthesize",
    "synthesize_grid",
    "analyze",
    "analyze_values",
    "l2_norm",
    "physical_l2_norm",
    "weighted_l2_norm",
    "fd_sublaplacian",
    "fd_T",
    "fd_hgrad_normsq",
    "coefficient_field",
    "gaussian_field",
    "ground_state_field",
    "lognormal_coefficients",
    "random_coefficients",
    "soliton_coefficients",
]

DEFAULT_RATIO = 2.0 ** (1.0 / 8.0)


# --------------------------------------------------------------------------- grids


@dataclass(frozen=True, eq=False)
class LambdaGrid:
    """Symmetric geometric grid of dual frequencies with log-trapezoid weights.

    Points are ordered ``-mag[::-1]`` then ``mag``, where
    ``mag[i] = lam_min * ratio**i``.  The weight of a point is
    ``|lambda| * ln(ratio)``, the trapezoid rule in ln|lambda|.
    """

    points: np.ndarray
    quad_weights: np.ndarray
    ratio: float
    count_per_sign: int
    lam_min: float

    def __post_init__(self):
        if self.ratio <= 1:
            raise DomainError("grid ratio must exceed 1")
        if np.any(self.points == 0):
            raise DomainError("lambda grid must not contain 0")

    @classmethod
    def geometric(cls, ratio: float = DEFAULT_RATIO, lam_min: float = 2.0**-7, lam_max: float = 2.0**7):
        if lam_min <= 0 or lam_max < lam_min:
            raise DomainError("need 0 < lam_min <= lam_max")
        if ratio <= 1:
            raise DomainError("grid ratio must exceed 1")
        n = int(round(math.log(lam_max / lam_min) / math.log(ratio))) + 1
        mag = lam_min * ratio ** np.arange(n, dtype=float)
        points = np.concatenate([-mag[::-1], mag])
        weights = np.abs(points) * math.log(ratio)
        return cls(points, weights, float(ratio), n, float(lam_min))

    @property
    def size(self) -> int:
        return 2 * self.count_per_sign

    @property
    def magnitudes(self) -> np.ndarray:
        return self.points[self.count_per_sign :]

    @property
    def lam_max(self) -> float:
        return float(self.points[-1])

    def same_as(self, other: "LambdaGrid") -> bool:
        return (
            self.count_per_sign == other.count_per_sign
            and self.ratio == other.ratio
            and self.lam_min == other.lam_min
        )


@dataclass(frozen=True, eq=False)
class SpectralCoefficients:
    """Coefficients c[k, j] of a cylindrical function.

    ``residual`` carries the projection residual of the analysis that
    produced the data (0 for data built directly in coefficient space).
    ``history`` records the diagonal multipliers applied since the last
    non-diagonal operation; see :func:`heisenberg_spectral.spectral.apply`.
    """

    d: int
    kmax: int
    grid: LambdaGrid
    c: np.ndarray
    residual: float = 0.0
    base: Optional[np.ndarray] = dc_field(default=None, repr=False)
    history: tuple = ()

    def __post_init__(self):
        if self.d < 1 or self.kmax < 0:
            raise DomainError("need d >= 1 and kmax >= 0")
        c = np.asarray(self.c, dtype=complex)
        if c.shape != (self.kmax + 1, self.grid.size):
            raise DomainError(f"coefficient shape {c.shape} does not match (kmax+1, grid size)")
        if not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be finite")
        object.__setattr__(self, "c", c)

    def with_c(self, c, residual=None) -> "SpectralCoefficients":
        return SpectralCoefficients(self.d, self.kmax, self.grid, c, self.residual if residual is None else residual)

    def scaled(self, a: complex) -> "SpectralCoefficients":
        return self.with_c(a * self.c)

    def __add__(self, other: "SpectralCoefficients") -> "SpectralCoefficients":
        if not (self.d == other.d and self.kmax == other.kmax and self.grid.same_as(other.grid)):
            raise DomainError("coefficient sets live on different grids")
        return self.with_c(self.c + other.c, residual=max(self.residual, other.residual))

    @classmethod
    def zeros(cls, d, kmax, grid):
        return cls(d, kmax, grid, np.zeros((kmax + 1, grid.size), dtype=complex))


def _composite_gl(edges, n):
    x, w = leggauss(n)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


def _radial_edges(r0, r_box, lam_max, kmax, d, phase, log_width):
    # Oscillation of phi_k^lambda in r: wavenumber about 2 sqrt(2 nu lambda) inside
    # the turning point r^2 = 2 nu / lambda, nu = k + d/2; products double it.
    nu = kmax + 0.5 * d + 1.0
    k_inner = 2.0 * math.sqrt(2.0 * nu * lam_max)
    edges = [r0]
    r = r0
    while r < r_box:
        wave = min(k_inner, 4.0 * nu / r)
        step = min(log_width * r, phase / wave)
        r = min(r + step, r_box)
        edges.append(r)
    return edges


def _graded_t_edges(t_box, t_min, grade, t_mid, panel):
    pos = [0.0, t_min]
    t = t_min
    while t * grade < t_mid:
        t *= grade
        pos.append(t)
    n_uniform = max(1, int(math.ceil((t_box - pos[-1]) / panel)))
    pos.extend(np.linspace(pos[-1], t_box, n_uniform + 1)[1:])
    return pos


@dataclass(frozen=True, eq=False)
class PhysicalGrid:
    """Tensor quadrature on (0, r_box) x (-t_box, t_box) for the measure Omega r^{2d-1} dr dt.

    The radial rule has one Gauss-Legendre panel on [0, r0] followed by
    panels sized from the basis oscillation rate; the t-rule is either the
    uniform trapezoid rule or a composite Gauss rule graded toward t = 0.
    """

    d: int
    r_nodes: np.ndarray
    r_weights: np.ndarray
    t_nodes: np.ndarray
    t_weights: np.ndarray
    r_box: float
    t_box: float
    r0: float
    t_rule: str

    @classmethod
    def build(
        cls,
        d: int,
        *,
        lam_max: float = 4.0,
        kmax: int = 48,
        r_box: float = 25.0,
        t_box: float = 12.0,
        dt: float = 0.045,
        r0: float = 1e-3,
        t_rule: str = "uniform",
        t_min: float = 1e-9,
        n_gl: int = 16,
        phase: float = 6.0,
        log_width: float = 0.5,
    ) -> "PhysicalGrid":
        """Build a grid resolving basis functions with |lambda| <= lam_max and k <= kmax.

        ``dt`` is the uniform t-step (uniform rule) or the largest panel width
        (graded rule); frequencies above pi/dt are aliased by the uniform rule.
        """
        if d < 1:
            raise DomainError("d must be positive")
        if not (0 < r0 < r_box) or t_box <= 0 or dt <= 0:
            raise DomainError("grid extents must be positive with r0 < r_box")
        x_in, w_in = _composite_gl([0.0, r0], n_gl)
        edges = _radial_edges(r0, r_box, lam_max, kmax, d, phase, log_width)
        x_out, w_out = _composite_gl(edges, n_gl)
        r = np.concatenate([x_in, x_out])
        wr = np.concatenate([w_in, w_out]) * sphere_area(d) * r ** (2 * d - 1)
        if t_rule == "uniform":
            n = int(math.ceil(2.0 * t_box / dt))
            t = np.linspace(-t_box, t_box, n + 1)
            h = t[1] - t[0]
            wt = np.full(n + 1, h)
            wt[0] = wt[-1] = 0.5 * h
        elif t_rule == "graded":
            pos_edges = _graded_t_edges(t_box, t_min, 2.0, 1.0, dt)
            tp, wp = _composite_gl(pos_edges, max(8, n_gl // 2))
            t = np.concatenate([-tp[::-1], tp])
            wt = np.concatenate([wp[::-1], wp])
        else:
            raise DomainError(f"unknown t-rule {t_rule!r}")
        return cls(d, r, wr, t, wt, float(r_box), float(t_box), float(r0), t_rule)

    @property
    def shape(self):
        return (len(self.r_nodes), len(self.t_nodes))

    def integrate(self, values) -> float:
        """Integrate a (nr, nt) array against the grid weights."""
        return float(np.einsum("i,ij,j->", self.r_weights, np.asarray(values), self.t_weights).real)


# --------------------------------------------------------------------------- fields


@dataclass(frozen=True, eq=False)
class ClosureField:
    """A deterministic closure f(r, t), vectorised over broadcast arrays.

    Coefficient-backed fields evaluate by synthesis; ``grid_func`` gives a
    faster tensor evaluation when available.
    """

    d: int
    func: Callable
    name: str = "field"
    coeffs: Optional[SpectralCoefficients] = None
    grid_func: Optional[Callable] = None

    def __call__(self, r, t):
        return self.func(np.asarray(r, dtype=float), np.asarray(t, dtype=float))

    def on_grid(self, r, t) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float)
        if self.grid_func is not None:
            return self.grid_func(r, t)
        return np.asarray(self.func(r[:, None], t[None, :]), dtype=complex) * np.ones((len(r), len(t)))

    def times(self, weight: WeightSpec, name: Optional[str] = None) -> "ClosureField":
        """Pointwise product with a weight; the result has no coefficient data."""
        f = self

        def func(r, t):
            return weight_eval(weight, r, t) * f(r, t)

        def grid_func(r, t):
            return weight_eval(weight, r[:, None], t[None, :]) * f.on_grid(r, t)

        return ClosureField(self.d, func, name or f"{weight.base.value}^{weight.exponent:g}*{self.name}", None, grid_func)


def coefficient_field(coeffs: SpectralCoefficients, name: str = "synthesized") -> ClosureField:
    def func(r, t):
        r, t = np.broadcast_arrays(r, t)
        return synthesize(coeffs, np.stack([r.ravel(), t.ravel()], axis=1)).reshape(r.shape)

    return ClosureField(coeffs.d, func, name, coeffs, lambda r, t: synthesize_grid(coeffs, r, t))


def gaussian_field(d: int, a: float = 1.0, b: float = 1.0) -> ClosureField:
    """f(r, t) = exp(-a r^2 - b t^2)."""

    def func(r, t):
        return np.exp(-a * r**2 - b * t**2) + 0j

    def grid_func(r, t):
        return np.outer(np.exp(-a * r**2), np.exp(-b * t**2)) + 0j

    return ClosureField(d, func, f"gaussian(a={a:g},b={b:g})", None, grid_func)


def ground_state_field(d: int, lam0: float) -> ClosureField:
    """exp(i lam0 t) exp(-|lam0| r^2): a single-frequency eigenfunction with eigenvalue 4 d |lam0|."""
    if lam0 == 0:
        raise DomainError("lam0 must be nonzero")
    a = abs(lam0)

    def func(r, t):
        return np.exp(1j * lam0 * t - a * r**2)

    return ClosureField(d, func, f"ground_state(lam0={lam0:g})")


# --------------------------------------------------------------------------- transforms


_TABLE_CACHE: dict = {}


def _half_table(kmax: int, d: int, grid: LambdaGrid, r: np.ndarray, cache: bool = True) -> np.ndarray:
    """phi_k^{|lambda|}(r) on the magnitude half-grid, laid out (n_mag, n_r, k) for batched matvecs.

    The basis depends on lambda only through |lambda|, so one table serves
    both signs.  A small cache keeps the most recent tables for grid-based
    synthesis and analysis.
    """
    key = (kmax, d, grid.ratio, grid.lam_min, grid.count_per_sign, r.shape, hash(r.tobytes()))
    if cache and key in _TABLE_CACHE:
        return _TABLE_CACHE[key]
    tab = np.ascontiguousarray(basis_table(kmax, d, grid.magnitudes, r).transpose(1, 2, 0))
    if cache:
        if len(_TABLE_CACHE) >= 2:
            _TABLE_CACHE.pop(next(iter(_TABLE_CACHE)))
        _TABLE_CACHE[key] = tab
    return tab


def _mag_order(c: np.ndarray, n: int):
    """Split columns ordered (-mag[::-1], mag) into two blocks in magnitude order."""
    return c[..., :n][..., ::-1], c[..., n:]


def _radial_sums(coeffs: SpectralCoefficients, r, cache: bool = True) -> np.ndarray:
    # F[j, i] = sum_k c[k, j] phi_k^{lambda_j}(r_i)
    n = coeffs.grid.count_per_sign
    tab = _half_table(coeffs.kmax, coeffs.d, coeffs.grid, np.asarray(r, dtype=float), cache)
    out = np.zeros((coeffs.grid.size, tab.shape[1]), dtype=complex)
    neg, pos = _mag_order(coeffs.c, n)
    for block, rows in ((neg, np.arange(n - 1, -1, -1)), (pos, np.arange(n, 2 * n))):
        live = np.flatnonzero(np.any(block != 0, axis=0))
        if live.size:
            out[rows[live]] = np.matmul(tab[live], block[:, live].T[:, :, None])[..., 0]
    return out


def synthesize_grid(coeffs: SpectralCoefficients, r, t) -> np.ndarray:
    """Values on the tensor grid r x t, shape (len(r), len(t))."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    g = coeffs.grid
    live = np.flatnonzero(np.any(coeffs.c != 0, axis=0))
    F = _radial_sums(coeffs, r)[live] * (g.quad_weights[live] / (2.0 * math.pi))[:, None]
    E = np.exp(-1j * np.outer(t, g.points[live]))
    return (E @ F).T


def synthesize(coeffs: SpectralCoefficients, points) -> np.ndarray:
    """Values at a list of (r, t) points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise DomainError("points must be finite")
    g = coeffs.grid
    out = np.empty(len(pts), dtype=complex)
    scale = g.quad_weights / (2.0 * math.pi)
    for start in range(0, len(pts), 512):
        chunk = pts[start : start + 512]
        F = _radial_sums(coeffs, chunk[:, 0], cache=False)
        E = np.exp(-1j * np.outer(chunk[:, 1], g.points))
        out[start : start + 512] = np.einsum("ij,j,ji->i", E, scale, F)
    return out


def _project(values: np.ndarray, d: int, kmax: int, grid: LambdaGrid, pgrid: PhysicalGrid):
    # values has shape (batch, nr, nt); returns c (batch, K, n) and Plancherel residuals (batch,)
    nb, nr, nt = values.shape
    E = np.exp(1j * np.outer(grid.points, pgrid.t_nodes)) * pgrid.t_weights[None, :]
    fhat = (values.reshape(nb * nr, nt) @ E.T).reshape(nb, nr, grid.size) * pgrid.r_weights[None, :, None]
    tab = _half_table(kmax, d, grid, pgrid.r_nodes)  # (n_mag, nr, K)
    n = grid.count_per_sign
    c = np.empty((nb, kmax + 1, grid.size), dtype=complex)
    neg, pos = fhat[:, :, :n][:, :, ::-1], fhat[:, :, n:]
    c[:, :, :n] = np.einsum("bim,mik->bkm", neg, tab)[:, :, ::-1]
    c[:, :, n:] = np.einsum("bim,mik->bkm", pos, tab)
    phys = np.einsum("i,bij,j->b", pgrid.r_weights, np.abs(values) ** 2, pgrid.t_weights)
    coef = np.einsum("j,bkj->b", grid.quad_weights, np.abs(c) ** 2) / (2.0 * math.pi)
    with np.errstate(divide="ignore", invalid="ignore"):
        residual = np.where(phys > 0, np.abs(phys - coef) / phys, np.where(coef == 0, 0.0, np.inf))
    return c, residual


def analyze(
    field: ClosureField,
    d: int,
    kmax: int,
    grid: LambdaGrid,
    pgrid: PhysicalGrid,
    gate: Optional[float] = 1e-6,
) -> SpectralCoefficients:
    """Project a closure onto the Fourier-Laguerre basis by quadrature.

    The result carries ``residual = |phys_norm^2 - coef_norm^2| / phys_norm^2``.
    A :class:`ResolutionError` is raised when it exceeds ``gate``
    (pass ``gate=None`` to only record it).
    """
    if pgrid.d != d:
        raise DomainError("physical grid built for a different d")
    values = field.on_grid(pgrid.r_nodes, pgrid.t_nodes)
    c, residual = _project(values[None], d, kmax, grid, pgrid)
    residual = float(residual[0])
    if gate is not None and residual > gate:
        raise ResolutionError(
            f"projection residual {residual:.3e} exceeds gate {gate:.1e} for {field.name}",
            value=residual,
            gate=gate,
        )
    return SpectralCoefficients(d, kmax, grid, c[0], residual)


def analyze_values(values, d: int, kmax: int, grid: LambdaGrid, pgrid: PhysicalGrid):
    """Batched projection of tabulated values with shape (batch, nr, nt).

    Returns the coefficient stack (batch, kmax + 1, grid size) and the
    per-item Plancherel residuals; gating is left to the caller.
    """
    values = np.asarray(values, dtype=complex)
    if values.ndim != 3 or values.shape[1:] != pgrid.shape:
        raise DomainError("values must have shape (batch, nr, nt) matching the physical grid")
    if pgrid.d != d:
        raise DomainError("physical grid built for a different d")
    return _project(values, d, kmax, grid, pgrid)


# --------------------------------------------------------------------------- norms


@dataclass(frozen=True)
class NormResult:
    value: float
    tail_r: float
    tail_t: float

    def __float__(self):
        return self.value


def l2_norm(coeffs: SpectralCoefficients) -> float:
    w = coeffs.grid.quad_weights / (2.0 * math.pi)
    return math.sqrt(float(np.sum(w * np.sum(np.abs(coeffs.c) ** 2, axis=0))))


def _norm_with_tails(values, pgrid: PhysicalGrid, gate):
    sq = np.abs(values) ** 2
    total = pgrid.integrate(sq)
    value = math.sqrt(max(total, 0.0))
    peak = float(np.max(np.abs(values))) if values.size else 0.0
    if peak == 0.0:
        return NormResult(value, 0.0, 0.0)
    tail_r = float(np.max(np.abs(values[-1, :]))) / peak
    tail_t = float(max(np.max(np.abs(values[:, 0])), np.max(np.abs(values[:, -1])))) / peak
    if gate is not None and max(tail_r, tail_t) > gate:
        raise ResolutionError(
            f"boundary tail {max(tail_r, tail_t):.3e} exceeds gate {gate:.1e}",
            value=max(tail_r, tail_t),
            gate=gate,
        )
    return NormResult(value, tail_r, tail_t)


def physical_l2_norm(field: ClosureField, pgrid: PhysicalGrid, tail_gate: Optional[float] = None) -> NormResult:
    """L^2 norm by tensor quadrature; tails are boundary magnitudes relative to the peak."""
    return _norm_with_tails(field.on_grid(pgrid.r_nodes, pgrid.t_nodes), pgrid, tail_gate)


def weighted_l2_norm(
    field: ClosureField, weight: WeightSpec, pgrid: PhysicalGrid, tail_gate: Optional[float] = None
) -> NormResult:
    """||w f|| by tensor quadrature.

    Singular weights need a grid with positive nodes only, which every
    :class:`PhysicalGrid` satisfies; for w4 use the graded t-rule so the
    t-profile r^2 / (r^4 + t^2) is resolved at small r.
    """
    r, t = pgrid.r_nodes, pgrid.t_nodes
    wv = weight_eval(weight, r[:, None], t[None, :])
    return _norm_with_tails(wv * field.on_grid(r, t), pgrid, tail_gate)


# --------------------------------------------------------------------------- finite differences


def _check_step(r, h):
    if h <= 0:
        raise DomainError("step must be positive")
    if np.any(np.asarray(r) <= h):
        raise DomainError("finite differences need r > h")


def fd_sublaplacian(field: ClosureField, r, t, h: float = 1e-3):
    """Second-order central-difference value of L f = -(f_rr + (2d-1)/r f_r) - 4 r^2 f_tt."""
    _check_step(r, h)
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    f0 = field(r, t)
    frp, frm = field(r + h, t), field(r - h, t)
    ftp, ftm = field(r, t + h), field(r, t - h)
    f_rr = (frp - 2 * f0 + frm) / h**2
    f_r = (frp - frm) / (2 * h)
    f_tt = (ftp - 2 * f0 + ftm) / h**2
    return -(f_rr + (2 * field.d - 1) / r * f_r) - 4 * r**2 * f_tt


def fd_T(field: ClosureField, r, t, h: float = 1e-3):
    """Central difference of d f / d t."""
    if h <= 0:
        raise DomainError("step must be positive")
    return (field(r, np.asarray(t) + h) - field(r, np.asarray(t) - h)) / (2 * h)


def fd_hgrad_normsq(field: ClosureField, pgrid: PhysicalGrid, h: float = 1e-4) -> float:
    """Quadrature of |f_r|^2 + 4 r^2 |f_t|^2, the horizontal gradient on cylindrical data.

    Radial differences straddle r = 0 at the smallest nodes; cylindrical
    closures are even in r, so evaluating at r - h < 0 is legitimate.
    """
    if h <= 0:
        raise DomainError("step must be positive")
    r, t = pgrid.r_nodes, pgrid.t_nodes
    f_r = (field.on_grid(r + h, t) - field.on_grid(r - h, t)) / (2 * h)
    f_t = (field.on_grid(r, t + h) - field.on_grid(r, t - h)) / (2 * h)
    return pgrid.integrate(np.abs(f_r) ** 2 + 4.0 * r[:, None] ** 2 * np.abs(f_t) ** 2)


# --------------------------------------------------------------------------- coefficient families


def lognormal_coefficients(
    d: int,
    kmax: int,
    grid: LambdaGrid,
    amplitudes,
    lam0: float = 1.0,
    width: float = 0.2,
    sign: int = 1,
    cutoff: float = 1e-20,
) -> SpectralCoefficients:
    """c[k, j] = a_k exp(-ln(|lambda_j| / lam0)^2 / (2 width^2)) on one sign of the grid.

    Profiles that are smooth in ln|lambda| make the discrete lambda-sum an
    accurate stand-in for the continuous Fourier integral in t.  Profile
    values below ``cutoff`` are set to zero so the support is finite.
    """
    a = np.asarray(amplitudes, dtype=complex)
    if a.shape != (kmax + 1,):
        raise DomainError("need one amplitude per Laguerre index")
    profile = np.exp(-(np.log(np.abs(grid.points) / lam0) ** 2) / (2.0 * width**2))
    profile = np.where(np.sign(grid.points) == sign, profile, 0.0)
    profile[profile < cutoff] = 0.0
    return SpectralCoefficients(d, kmax, grid, np.outer(a, profile))


def random_coefficients(
    d: int,
    kmax: int,
    grid: LambdaGrid,
    rng: np.random.Generator,
    *,
    k_band: Optional[int] = None,
    lam0_range=(0.8, 1.2),
    width: float = 0.2,
    decay: float = 8.0,
) -> SpectralCoefficients:
    """Seeded band-limited test data: complex Gaussian amplitudes on k <= k_band on both signs.

    The lambda-support is further restricted to the central 80% of each
    sign's index range.
    """
    k_band = kmax - 8 if k_band is None else k_band
    if not 0 <= k_band <= kmax:
        raise DomainError("k_band must lie in [0, kmax]")
    out = None
    for sign in (1, -1):
        amps = np.zeros(kmax + 1, dtype=complex)
        z = rng.standard_normal(k_band + 1) + 1j * rng.standard_normal(k_band + 1)
        amps[: k_band + 1] = z * np.exp(-np.arange(k_band + 1) / decay)
        lam0 = rng.uniform(*lam0_range)
        part = lognormal_coefficients(d, kmax, grid, amps, lam0, width, sign)
        out = part if out is None else out + part
    n = grid.count_per_sign
    keep = np.zeros(n, dtype=bool)
    keep[int(math.ceil(0.1 * n)) : n - int(math.ceil(0.1 * n))] = True
    mask = np.concatenate([keep[::-1], keep])
    return out.with_c(np.where(mask[None, :], out.c, 0.0))


def soliton_coefficients(d: int, kmax: int, grid: LambdaGrid, g: Callable) -> SpectralCoefficients:
    """Coefficients of f(r, t) = int_0^inf exp(i t lambda) exp(-lambda r^2) g(lambda) d lambda.

    Only the k = 0, lambda < 0 branch is populated: with the synthesis
    convention exp(-i lambda t), the frequency lambda of the integral sits
    at grid point -lambda, and c = 2 pi g(|lambda|) / n_{0,d,lambda}.
    """
    c = np.zeros((kmax + 1, grid.size), dtype=complex)
    for j, lam in enumerate(grid.points):
        if lam < 0:
            c[0, j] = 2.0 * math.pi * g(-lam) / basis_norm(0, d, lam)
    return SpectralCoefficients(d, kmax, grid, c)
