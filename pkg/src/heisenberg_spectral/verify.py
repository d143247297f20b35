"""Numerical checks of the resolvent, Hardy and smoothing estimates on cylindrical data.

Every runner returns a :class:`VerificationReport`.  Bounds come from
:mod:`heisenberg_spectral.constants`; tolerances and resolution gates are
harness parameters.

Weighted sandwiches G R(sigma) G* are evaluated in the Fourier-Laguerre
representation: the weighted test field is projected once, all diagonal
factors are composed into a single multiplier, and the final weighted norm is
the quadratic form of the weight's Gram matrix (see :mod:`.gram`).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy.integrate import quad, solve_ivp

from . import constants
from .errors import DomainError, OptimizationError, ResolutionError
from .field import (
    LambdaGrid,
    PhysicalGrid,
    SpectralCoefficients,
    _radial_sums,
    analyze,
    analyze_values,
    coefficient_field,
    fd_sublaplacian,
    ground_state_field,
    l2_norm,
    random_coefficients,
    soliton_coefficients,
    synthesize,
    synthesize_grid,
    weighted_l2_norm,
)
from .gram import PipelineConfig, gram_model
from .spectral import (
    AbsT,
    Conformal,
    OperatorSpec,
    PowerOfL,
    Product,
    Propagator,
    PureFractional,
    Resolvent,
    SobolevJapaneseBracket,
    SubLaplacian,
    apply,
    comparability_range,
    comparability_ratio,
    dilate,
    dilation_tau,
    eig_L,
    multiplier,
    multiplier_table,
)
from .weights import WeightSpec, weight_eval

__all__ = [
    "VerificationReport",
    "GWeightSpec",
    "GaussianBump",
    "FieldFamily",
    "SPEC_FAMILY",
    "RESOLVED_FAMILY",
    "sigma_grid",
    "run_soliton",
    "run_hardy",
    "run_lemma43",
    "run_resolvent_sup",
    "run_smoothing",
    "run_birman_schwinger",
    "run_convention",
    "run_fd_order",
    "run_ground_state_convention",
    "run_dawson_value",
    "run_kappa",
    "sandwich_ratios",
    "sandwich_norms",
    "hardy_quotient",
    "hardy_grid",
    "birman_schwinger_norm",
    "radial_moment",
    "WavePackets",
    "run_homogeneity",
    "run_roundtrip",
    "run_dawson_checks",
    "run_kappa_checks",
    "run_bounds",
    "run_thresholds",
    "run_gronwall",
    "run_conformal_identity",
    "run_comparability",
    "run_commutation",
    "smoothing_data",
]


# ----------------------------------------------------------------------------- reports


@dataclass
class VerificationReport:
    """Outcome of one named check.

    ``kind`` fixes how ``passed`` is decided:

    * ``"upper"``: measured <= bound + tolerance
    * ``"lower"``: measured >= bound - tolerance
    * ``"residual"``: measured <= tolerance (``bound`` is NaN)
    * ``"value"``: a computed constant; passes when finite

    In every case each entry of ``residuals`` must also sit at or below its
    entry in ``gates``.
    """

    name: str
    params: Dict[str, object]
    measured: float
    bound: float = math.nan
    tolerance: float = 0.0
    kind: str = "upper"
    residuals: Dict[str, float] = field(default_factory=dict)
    gates: Dict[str, float] = field(default_factory=dict)
    runtime_ms: int = 0

    def __post_init__(self):
        if self.kind not in ("upper", "lower", "residual", "value"):
            raise DomainError(f"unknown report kind {self.kind!r}")
        self.measured = float(self.measured)
        self.bound = float(self.bound)

    @property
    def margin(self) -> float:
        """Distance to failure: positive when the check holds with room to spare."""
        if self.kind == "upper":
            return self.bound - self.measured
        if self.kind == "lower":
            return self.measured - self.bound
        if self.kind == "residual":
            return self.tolerance - self.measured
        return math.nan

    @property
    def residuals_ok(self) -> bool:
        return all(
            math.isfinite(v) and v <= self.gates[k] for k, v in self.residuals.items() if k in self.gates
        )

    @property
    def passed(self) -> bool:
        m = self.measured
        if not math.isfinite(m):
            return False
        if self.kind == "upper":
            ok = m <= self.bound + self.tolerance
        elif self.kind == "lower":
            ok = m >= self.bound - self.tolerance
        elif self.kind == "residual":
            ok = m <= self.tolerance
        else:
            ok = True
        return ok and self.residuals_ok

    def as_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "params": dict(self.params),
            "measured": self.measured,
            "bound": self.bound,
            "tolerance": self.tolerance,
            "margin": self.margin,
            "pass": self.passed,
            "kind": self.kind,
            "residuals": dict(self.residuals),
            "gates": dict(self.gates),
            "runtime_ms": self.runtime_ms,
        }


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = int(round(1000.0 * (time.perf_counter() - self.start)))


# ----------------------------------------------------------------------------- data families


@dataclass(frozen=True)
class GaussianBump:
    """g(lambda) = exp(-(lambda - center)^2 / (2 width^2)) for lambda > 0."""

    center: float = 2.0
    width: float = 0.4

    def __post_init__(self):
        if self.width <= 0:
            raise DomainError("bump width must be positive")

    def __call__(self, lam: float) -> float:
        return math.exp(-((lam - self.center) ** 2) / (2.0 * self.width**2)) if lam > 0 else 0.0


@dataclass(frozen=True)
class FieldFamily:
    """Seeded random coefficient fields, see :func:`random_coefficients`."""

    kmax: int = 48
    k_band: Optional[int] = None
    lam0_range: Tuple[float, float] = (0.8, 1.2)
    width: float = 0.2

    def draw(self, d: int, grid: LambdaGrid, rng: np.random.Generator) -> SpectralCoefficients:
        return random_coefficients(
            d, self.kmax, grid, rng, k_band=self.k_band, lam0_range=self.lam0_range, width=self.width
        )

    def sample(self, d: int, grid: LambdaGrid, count: int, seed: int) -> List[SpectralCoefficients]:
        rng = np.random.default_rng([seed, d])
        return [self.draw(d, grid, rng) for _ in range(count)]


#: k <= kmax - 8 on the central 80% of the grid.
SPEC_FAMILY = FieldFamily()
#: Low-k data at moderate |lambda| that the default physical grids resolve.
RESOLVED_FAMILY = FieldFamily(k_band=8, lam0_range=(1.8, 2.2), width=0.25)


def _default_grid() -> LambdaGrid:
    return LambdaGrid.geometric()


# ----------------------------------------------------------------------------- soliton


def run_soliton(
    d: int = 1,
    g: Callable[[float], float] = GaussianBump(),
    tau_list: Sequence[float] = (0.1, 0.5, 1.0),
    grid: Optional[LambdaGrid] = None,
    r_max: float = 3.0,
    t_half: float = 3.0,
    n_r: int = 13,
    n_t: int = 25,
    tolerance: float = 1e-6,
    oracle_gate: float = 1e-6,
    edge_gate: float = 1e-4,
) -> VerificationReport:
    """The propagator of L moves f*(r, t) = int e^{i t lam} e^{-lam r^2} g(lam) d lam along t at speed 4d.

    ``measured`` compares the propagated field with the synthesized f*
    evaluated at t - 4 d tau; the residual ``oracle`` compares the synthesized
    f* itself with direct quadrature of the defining integral over
    (0, lam_max), so profile mass below the grid shows up there.
    """
    with _Timer() as timer:
        grid = grid or _default_grid()
        mags = grid.magnitudes
        g_vals = np.array([g(x) for x in mags])
        peak = float(np.max(np.abs(g_vals)))
        if peak == 0:
            raise DomainError("profile vanishes on the grid")
        edge = max(abs(g_vals[0]), abs(g_vals[-1])) / peak
        if edge > edge_gate:
            raise ResolutionError(f"profile not resolved by the grid (edge ratio {edge:.2e})", value=edge, gate=edge_gate)
        base = soliton_coefficients(d, 0, grid, g)
        speed = float(eig_L(0, 1.0, d))  # 4 d
        r = np.linspace(0.0, r_max, n_r)
        worst = 0.0
        oracle_err = 0.0
        for tau in tau_list:
            shift = speed * tau
            t = shift + np.linspace(-t_half, t_half, n_t)
            moved = synthesize_grid(apply(Propagator(SubLaplacian(), tau), base), r, t)
            ref = synthesize_grid(base, r, t - shift)
            scale = float(np.max(np.abs(ref)))
            worst = max(worst, float(np.max(np.abs(moved - ref))) / scale)
            exact = np.array([[_soliton_integral(g, ri, ti - shift, grid) for ti in t] for ri in r])
            oracle_err = max(oracle_err, float(np.max(np.abs(ref - exact))) / float(np.max(np.abs(exact))))
    return VerificationReport(
        "soliton",
        {"d": d, "tau": list(map(float, tau_list)), "profile": repr(g)},
        worst,
        tolerance=tolerance,
        kind="residual",
        residuals={"oracle": oracle_err, "edge": float(edge)},
        gates={"oracle": oracle_gate, "edge": edge_gate},
        runtime_ms=timer.ms,
    )


def _soliton_integral(g, r: float, t: float, grid: LambdaGrid) -> complex:
    lo, hi = 0.0, float(grid.lam_max)
    kw = dict(epsabs=1e-14, epsrel=1e-13, limit=400)
    re = quad(lambda x: math.cos(t * x) * math.exp(-x * r * r) * g(x), lo, hi, **kw)[0]
    im = quad(lambda x: math.sin(t * x) * math.exp(-x * r * r) * g(x), lo, hi, **kw)[0]
    return re + 1j * im


# ----------------------------------------------------------------------------- Hardy and commutator inequalities


_HARDY_WEIGHTS = {"W4": WeightSpec("W4"), "InvZ": WeightSpec("InvAbsZ")}


def hardy_grid(d: int) -> PhysicalGrid:
    """Physical grid used for the Hardy quotients of :data:`RESOLVED_FAMILY` fields."""
    return PhysicalGrid.build(d, lam_max=8.0, kmax=48, r_box=10.0, t_box=12.0, dt=0.5, t_rule="graded")


def run_hardy(
    d: int = 1,
    which: str = "W4",
    family: FieldFamily = RESOLVED_FAMILY,
    count: int = 100,
    seed: int = 0,
    grid: Optional[LambdaGrid] = None,
    pgrid: Optional[PhysicalGrid] = None,
    tolerance: float = 1e-6,
    plancherel_gate: float = 1e-4,
    tail_gate: float = 1e-2,
) -> VerificationReport:
    """max ||w f|| / ||L^{1/2} f|| over seeded fields, with w = w4 or |z|^{-1}.

    The weighted norm is physical quadrature on a graded grid; the
    denominator is exact in coefficient space.  The residual ``plancherel``
    is the largest relative gap between the physical and coefficient norms
    of f, which bounds the quadrature error of the numerator.
    """
    if which not in _HARDY_WEIGHTS:
        raise DomainError(f"unknown Hardy weight {which!r}")
    bound = constants.hardy_bound(which, d)
    with _Timer() as timer:
        grid = grid or _default_grid()
        pgrid = pgrid or hardy_grid(d)
        W = weight_eval(_HARDY_WEIGHTS[which], pgrid.r_nodes[:, None], pgrid.t_nodes[None, :])
        worst = 0.0
        plancherel = 0.0
        tails = 0.0
        for c in family.sample(d, grid, count, seed):
            q = hardy_quotient(c, which, pgrid, W)
            worst = max(worst, q[0])
            plancherel = max(plancherel, q[1])
            tails = max(tails, q[2])
    return VerificationReport(
        f"hardy_{which}",
        {"d": d, "which": which, "count": count, "seed": seed},
        worst,
        bound,
        tolerance,
        "upper",
        {"plancherel": plancherel, "tails": tails},
        {"plancherel": plancherel_gate, "tails": tail_gate},
        timer.ms,
    )


def hardy_quotient(
    c: SpectralCoefficients, which: str, pgrid: PhysicalGrid, W: Optional[np.ndarray] = None
) -> Tuple[float, float, float]:
    """(||w f|| / ||L^{1/2} f||, Plancherel defect, boundary tail) for one coefficient field."""
    if W is None:
        W = weight_eval(_HARDY_WEIGHTS[which], pgrid.r_nodes[:, None], pgrid.t_nodes[None, :])
    vals = synthesize_grid(c, pgrid.r_nodes, pgrid.t_nodes)
    plancherel = abs(math.sqrt(pgrid.integrate(np.abs(vals) ** 2)) / l2_norm(c) - 1.0)
    weighted = W * vals
    peak = float(np.max(np.abs(weighted)))
    tails = max(
        float(np.max(np.abs(weighted[-1]))),
        float(np.max(np.abs(weighted[:, 0]))),
        float(np.max(np.abs(weighted[:, -1]))),
    ) / peak
    num = math.sqrt(pgrid.integrate(np.abs(weighted) ** 2))
    return num / l2_norm(apply(PowerOfL(0.5), c)), plancherel, tails


def radial_moment(c: SpectralCoefficients, power: float, r_grid: Optional[PhysicalGrid] = None) -> float:
    """sum_j w_j / (2 pi) lambda_j^2 int r^power |F_j(r)|^2 d mu by radial quadrature.

    F_j is the radial profile at lambda_j, so with ``power = 2`` this is
    || |z| T f ||^2 for cylindrical f.
    """
    if r_grid is None:
        r_grid = PhysicalGrid.build(c.d, lam_max=8.0, kmax=c.kmax, r_box=40.0, t_box=1.0, dt=1.0)
    F = _radial_sums(c, r_grid.r_nodes)
    w = c.grid.quad_weights / (2.0 * math.pi) * c.grid.points**2
    return float(np.sum(w * (np.abs(F) ** 2 @ (r_grid.r_weights * r_grid.r_nodes**power))))


def run_lemma43(
    d: int = 1,
    family: FieldFamily = SPEC_FAMILY,
    count: int = 100,
    seed: int = 0,
    grid: Optional[LambdaGrid] = None,
    t_tolerance: float = 1e-8,
    rt_tolerance: float = 1e-4,
) -> List[VerificationReport]:
    """||T f|| / ||L f|| and || |z| T f || / ||L^{1/2} f|| over seeded fields.

    The first quotient is exact in coefficient space; the second uses radial
    quadrature of each lambda-profile.
    """
    with _Timer() as timer:
        grid = grid or _default_grid()
        fields = family.sample(d, grid, count, seed)
        r_grid = PhysicalGrid.build(d, lam_max=8.0, kmax=family.kmax, r_box=40.0, t_box=1.0, dt=1.0)
        t_ratio = 0.0
        rt_ratio = 0.0
        for c in fields:
            t_ratio = max(t_ratio, l2_norm(apply(AbsT(1.0), c)) / l2_norm(apply(SubLaplacian(), c)))
            rt = math.sqrt(radial_moment(c, 2.0, r_grid))
            rt_ratio = max(rt_ratio, rt / l2_norm(apply(PowerOfL(0.5), c)))
    params = {"d": d, "count": count, "seed": seed}
    return [
        VerificationReport("lemma43_T", params, t_ratio, constants.LEMMA43_T_BOUND, t_tolerance, runtime_ms=timer.ms),
        VerificationReport("lemma43_rT", params, rt_ratio, constants.LEMMA43_RT_BOUND, rt_tolerance, runtime_ms=0),
    ]


# ----------------------------------------------------------------------------- weighted sandwiches


@dataclass(frozen=True)
class GWeightSpec:
    """The operator G = weight * S of a weighted resolvent estimate.

    I: w1^s <L>^{(s-1)/2};  II: w2^s <L>^{(s-1)/2};
    III: w3^mu L^{s/2} <L>^{-1/4};  IV: w4^mu L^{(s-mu)/2}.
    """

    case: str
    s: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if self.case in ("I", "II"):
            if not 0.5 < self.s <= 1:
                raise DomainError(f"case {self.case} needs 1/2 < s <= 1")
        elif self.case in ("III", "IV"):
            if not 0.5 < self.mu <= 1:
                raise DomainError(f"case {self.case} needs 1/2 < mu <= 1")
            if not self.s > 0:
                raise DomainError("s must be positive")
        else:
            raise DomainError(f"unknown case {self.case!r}")

    def check_dimension(self, d: int) -> None:
        if d < 1 or (self.case == "II" and d < 2):
            raise DomainError(f"case {self.case} is not available for d = {d}")

    @property
    def weight(self) -> WeightSpec:
        base = {"I": "W1", "II": "W2", "III": "W3", "IV": "W4"}[self.case]
        return WeightSpec(base, self.s if self.case in ("I", "II") else self.mu)

    @property
    def sobolev(self) -> OperatorSpec:
        if self.case in ("I", "II"):
            return SobolevJapaneseBracket(0.5 * (self.s - 1.0))
        if self.case == "III":
            return Product([PowerOfL(0.5 * self.s), SobolevJapaneseBracket(-0.25)])
        return PowerOfL(0.5 * (self.s - self.mu))


def _h_class(H: OperatorSpec) -> Tuple[str, float]:
    if isinstance(H, SubLaplacian):
        return "pure", 1.0
    if isinstance(H, PureFractional):
        return "pure", H.s
    if isinstance(H, Conformal):
        return "conformal", H.s
    raise DomainError(f"H must be L, L^s or L_s, got {H!r}")


def _h_name(H: OperatorSpec) -> str:
    cls, s = _h_class(H)
    if isinstance(H, SubLaplacian):
        return "L"
    return f"L^{s:g}" if cls == "pure" else f"L_{s:g}"


def sigma_grid(
    n_modulus: int = 25,
    modulus_range: Tuple[float, float] = (1e-2, 1e2),
    arguments: Sequence[float] = (
        math.pi / 6,
        -math.pi / 6,
        math.pi / 2,
        -math.pi / 2,
        5 * math.pi / 6,
        -5 * math.pi / 6,
        1e-2,
        -1e-2,
    ),
) -> np.ndarray:
    """Log-spaced moduli on rays; the rays at arg = +-1e-2 hug the spectrum."""
    mods = np.geomspace(modulus_range[0], modulus_range[1], n_modulus)
    return np.array([m * np.exp(1j * a) for a in arguments for m in mods])


@dataclass(frozen=True)
class WavePackets:
    """f = P(r^2) exp(-alpha r^2 - beta t^2 + i gamma t) with random quadratic P.

    ``real=True`` draws real P and gamma = 0, so f is real valued.
    """

    alpha: Tuple[float, float] = (0.5, 2.0)
    beta: Tuple[float, float] = (0.5, 2.0)
    gamma: Tuple[float, float] = (-3.0, 3.0)
    real: bool = False

    def values(self, r: np.ndarray, t: np.ndarray, indices: Sequence[int], seed: int) -> np.ndarray:
        """Packets number ``indices`` tabulated on r x t; packet i depends only on (seed, i)."""
        out = np.empty((len(indices), len(r), len(t)), dtype=complex)
        for n, i in enumerate(indices):
            rng = np.random.default_rng([seed, i])
            a, b = rng.uniform(*self.alpha), rng.uniform(*self.beta)
            g = 0.0 if self.real else rng.uniform(*self.gamma)
            p = rng.standard_normal(3) + (0.0 if self.real else 1j * rng.standard_normal(3))
            fr = (p[0] + p[1] * r**2 + p[2] * r**4) * np.exp(-a * r**2)
            ft = np.exp(-b * t**2 + 1j * g * t)
            out[n] = np.outer(fr, ft)
        return out


@lru_cache(maxsize=32)
def _projected_packets(weight: WeightSpec, d: int, count: int, seed: int, packets: WavePackets, config: PipelineConfig):
    """Euclidean coefficients of w f for each packet, ||f||, and projection residuals."""
    pg = config.projection_grid(d)
    grid = config.grid()
    W = weight_eval(weight, pg.r_nodes[:, None], pg.t_nodes[None, :])
    model = gram_model(weight, d, config)
    coeffs, norms, residuals = [], [], []
    for start in range(0, count, 10):
        vals = packets.values(pg.r_nodes, pg.t_nodes, range(start, min(start + 10, count)), seed)
        c, res = analyze_values(vals * W[None], d, config.kmax, grid, pg)
        coeffs.append(model.euclid(c))
        norms.append(np.sqrt(np.einsum("i,bij,j->b", pg.r_weights, np.abs(vals) ** 2, pg.t_weights)))
        residuals.append(res)
    return np.concatenate(coeffs), np.concatenate(norms), np.concatenate(residuals)


def _quadratic_rows(M: np.ndarray, X: np.ndarray) -> np.ndarray:
    """x^* M x for each row of X with M real symmetric."""
    Xr, Xi = np.ascontiguousarray(X.real), np.ascontiguousarray(X.imag)
    return np.einsum("bi,bi->b", Xr, Xr @ M) + np.einsum("bi,bi->b", Xi, Xi @ M)


def _sandwich_diagonal(H: OperatorSpec, G: GWeightSpec, d: int, config: PipelineConfig, model):
    grid = config.grid()
    S2 = np.abs(multiplier_table(G.sobolev, config.kmax, grid, d)) ** 2
    mH = multiplier_table(H, config.kmax, grid, d).real
    return lambda sigma: model.diag_euclid(S2 / (mH - complex(sigma)))


def sandwich_norms(
    H: OperatorSpec,
    G: GWeightSpec,
    d: int,
    sigmas: Sequence[complex],
    values: np.ndarray,
    config: PipelineConfig = PipelineConfig(),
) -> Tuple[np.ndarray, np.ndarray]:
    """||G R(sigma) G* f|| for fields tabulated on ``config.projection_grid(d)``.

    ``values`` has shape (batch, nr, nt).  Returns the norms with shape
    (len(sigmas), batch) and the projection residuals of w f.
    """
    G.check_dimension(d)
    pg = config.projection_grid(d)
    W = weight_eval(G.weight, pg.r_nodes[:, None], pg.t_nodes[None, :])
    c, residuals = analyze_values(np.asarray(values) * W[None], d, config.kmax, config.grid(), pg)
    model = gram_model(G.weight, d, config)
    B = model.euclid(c)
    diag = _sandwich_diagonal(H, G, d, config, model)
    out = np.empty((len(sigmas), B.shape[0]))
    for i, sigma in enumerate(sigmas):
        Resolvent(H, sigma)  # raises PoleError on the real axis
        out[i] = np.sqrt(np.maximum(_quadratic_rows(model.matrix, B * diag(sigma)[None, :]), 0.0))
    residuals = np.where(np.isfinite(residuals), residuals, 0.0)
    return out, residuals


def sandwich_ratios(
    H: OperatorSpec,
    G: GWeightSpec,
    d: int,
    sigmas: Sequence[complex],
    count: int = 50,
    seed: int = 0,
    packets: WavePackets = WavePackets(),
    config: PipelineConfig = PipelineConfig(),
):
    """||G R(sigma) G* f|| / ||f|| for each sigma (rows) and packet (columns), plus residuals."""
    G.check_dimension(d)
    for sigma in sigmas:
        if complex(sigma).imag == 0:
            Resolvent(H, sigma)  # raises PoleError
    B, norms, residuals = _projected_packets(G.weight, d, count, seed, packets, config)
    model = gram_model(G.weight, d, config)
    diag = _sandwich_diagonal(H, G, d, config, model)
    out = np.zeros((len(sigmas), count))
    live = norms > 0
    for i, sigma in enumerate(sigmas):
        q = _quadratic_rows(model.matrix, B * diag(sigma)[None, :])
        out[i, live] = np.sqrt(np.maximum(q[live], 0.0)) / norms[live]
    return out, residuals


def run_resolvent_sup(
    H: OperatorSpec = SubLaplacian(),
    G: GWeightSpec = GWeightSpec("IV"),
    d: int = 1,
    sigmas: Optional[Sequence[complex]] = None,
    count: int = 50,
    seed: int = 0,
    packets: WavePackets = WavePackets(),
    config: PipelineConfig = PipelineConfig(),
    projection_gate: float = 0.1,
) -> VerificationReport:
    """max over sigma and packets of ||G R(sigma) G* f|| / ||f|| against the constants-module bound.

    The residual ``projection`` is the largest relative Bessel deficit of the
    single projection of w f onto the truncated basis.
    """
    h_cls, s = _h_class(H)
    if abs(s - G.s) > 1e-15:
        raise DomainError(f"G was built for s = {G.s} but H has s = {s}")
    bound = constants.resolvent_bound(G.case, d, s, G.mu, h_cls)
    with _Timer() as timer:
        sigmas = sigma_grid() if sigmas is None else np.asarray(sigmas, dtype=complex)
        ratios, residuals = sandwich_ratios(H, G, d, sigmas, count, seed, packets, config)
        i, j = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    return VerificationReport(
        "resolvent_sup",
        {
            "d": d,
            "case": G.case,
            "s": G.s,
            "mu": G.mu,
            "H": _h_name(H),
            "n_sigma": len(sigmas),
            "count": count,
            "seed": seed,
            "argmax_sigma_re": float(sigmas[i].real),
            "argmax_sigma_im": float(sigmas[i].imag),
        },
        float(ratios[i, j]),
        bound,
        0.0,
        "upper",
        {"projection": float(np.max(residuals))},
        {"projection": projection_gate},
        timer.ms,
    )


# ----------------------------------------------------------------------------- smoothing


SMOOTHING_GRID_SPEC = (2.0 ** (1.0 / 32.0), 2.0**-4, 2.0**4)


def smoothing_data(d: int = 1, g: Callable[[float], float] = GaussianBump(2.0, 0.3)) -> SpectralCoefficients:
    """A k = 0 Gaussian bump in lambda on a fine grid, so the t-translation it undergoes
    stays far from the recurrence time of the discrete lambda-sum."""
    return soliton_coefficients(d, 0, LambdaGrid.geometric(*SMOOTHING_GRID_SPEC), g)


def _smoothing_integral(model, S, mH, c, tau_max: float, n_tau: int) -> float:
    taus = np.linspace(-tau_max, tau_max, n_tau)
    q = np.empty(n_tau)
    for start in range(0, n_tau, 256):
        tt = taus[start : start + 256]
        X = model.euclid(S[None] * np.exp(-1j * tt[:, None, None] * mH[None]) * c[None])
        q[start : start + 256] = _quadratic_rows(model.matrix, X)
    h = taus[1] - taus[0]
    return float(h * (np.sum(q) - 0.5 * (q[0] + q[-1])))


def run_smoothing(
    H: OperatorSpec = SubLaplacian(),
    G: GWeightSpec = GWeightSpec("IV"),
    d: int = 1,
    u0: Optional[SpectralCoefficients] = None,
    tau_max: float = 4.0,
    n_tau: int = 801,
    growth_gate: float = 0.05,
) -> VerificationReport:
    """int_{-tau_max}^{tau_max} ||G exp(-i tau H) u0||^2 d tau / ||u0||^2 against the Kato level.

    The integral is repeated on [-2 tau_max, 2 tau_max] with the same step;
    ``measured`` is the larger of the two, and the relative growth between
    them is gated.  The evolution is diagonal, so the Gram matrix is only
    assembled on the lambda-support of u0.
    """
    h_cls, s = _h_class(H)
    if abs(s - G.s) > 1e-15:
        raise DomainError(f"G was built for s = {G.s} but H has s = {s}")
    G.check_dimension(d)
    if n_tau < 3 or tau_max <= 0:
        raise DomainError("need tau_max > 0 and at least 3 tau-nodes")
    reference = constants.kato_reference(constants.resolvent_bound(G.case, d, s, G.mu, h_cls))
    with _Timer() as timer:
        u0 = smoothing_data(d) if u0 is None else u0
        if u0.d != d:
            raise DomainError("u0 was built for a different d")
        norm2 = l2_norm(u0) ** 2
        params = {"d": d, "case": G.case, "s": G.s, "mu": G.mu, "H": _h_name(H), "tau_max": tau_max, "n_tau": n_tau}
        if norm2 == 0:
            return VerificationReport(
                "smoothing", params, 0.0, reference, 0.0, "upper", {"growth": 0.0}, {"growth": growth_gate}
            )
        cols = tuple(int(j) for j in np.flatnonzero(np.any(u0.c != 0, axis=0)))
        config = PipelineConfig.for_grid(u0.grid, u0.kmax)
        model = gram_model(G.weight, d, config, cols)
        S = multiplier_table(G.sobolev, u0.kmax, u0.grid, d)
        mH = multiplier_table(H, u0.kmax, u0.grid, d).real
        first = _smoothing_integral(model, S, mH, u0.c, tau_max, n_tau) / norm2
        second = _smoothing_integral(model, S, mH, u0.c, 2.0 * tau_max, 2 * n_tau - 1) / norm2
        growth = abs(second - first) / first if first > 0 else 0.0
    params.update({"partial_tau_max": first, "partial_2tau_max": second})
    return VerificationReport(
        "smoothing",
        params,
        max(first, second),
        reference,
        0.0,
        "upper",
        {"growth": growth},
        {"growth": growth_gate},
        timer.ms,
    )


# ----------------------------------------------------------------------------- Birman-Schwinger


def birman_schwinger_norm(
    case: str,
    d: int,
    sigma: complex,
    power_iters: int = 20000,
    rtol: float = 1e-12,
    seed: int = 0,
    config: PipelineConfig = PipelineConfig(),
) -> Tuple[float, int]:
    """||w R(sigma) w|| on the truncated model, by power iteration.

    With Gram matrix M and diagonal D the operator norm squared is the top
    eigenvalue of D^* M D M, which is self-adjoint for <u, v>_M = u^* M v.
    Returns the norm and the number of iterations used.
    """
    weight = WeightSpec("W1" if case == "I" else "W2")
    if case not in ("I", "II"):
        raise DomainError(f"unknown stability case {case!r}")
    Resolvent(SubLaplacian(), sigma)  # raises on the real axis
    model = gram_model(weight, d, config)
    M = model.matrix
    D = model.diag_euclid(multiplier_table(Resolvent(SubLaplacian(), sigma), config.kmax, config.grid(), d))
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.shape[0]) + 1j * rng.standard_normal(M.shape[0])
    v /= math.sqrt(np.real(np.vdot(v, M @ v)))
    rho = 0.0
    for it in range(1, power_iters + 1):
        y = D * (M @ v)
        My = M @ y
        new_rho = float(np.real(np.vdot(y, My)))
        v = np.conj(D) * My
        v /= math.sqrt(np.real(np.vdot(v, M @ v)))
        if it > 1 and abs(new_rho - rho) <= rtol * new_rho:
            return math.sqrt(new_rho), it
        rho = new_rho
    raise OptimizationError(f"power iteration did not converge in {power_iters} steps")


def run_birman_schwinger(
    d: int = 1,
    case: str = "I",
    C_factor: float = 0.5,
    sigma: complex = 1j,
    power_iters: int = 20000,
    config: PipelineConfig = PipelineConfig(),
) -> VerificationReport:
    """||A R(sigma) B*|| for V = C w^2, C = C_factor * threshold, A = B = sqrt(C) w."""
    if not 0 <= C_factor <= 1:
        raise DomainError("C_factor must lie in [0, 1]")
    threshold = constants.stability_threshold(case, d)
    with _Timer() as timer:
        C = C_factor * threshold
        if C == 0:
            norm, iters = 0.0, 0
        else:
            base, iters = birman_schwinger_norm(case, d, sigma, power_iters, config=config)
            norm = C * base
    return VerificationReport(
        "birman_schwinger",
        {
            "d": d,
            "case": case,
            "C_factor": C_factor,
            "coupling": C,
            "sigma_re": float(complex(sigma).real),
            "sigma_im": float(complex(sigma).imag),
            "iterations": iters,
        },
        norm,
        1.0,
        0.0,
        "upper",
        runtime_ms=timer.ms,
    )


# ----------------------------------------------------------------------------- conventions and transforms


def _fd_points():
    r = np.linspace(0.1, 2.5, 12)
    t = np.linspace(-2.0, 2.0, 9)
    return np.meshgrid(r, t, indexing="ij")


def _fd_errors(d: int, family: FieldFamily, count: int, seed: int, steps: Sequence[float]) -> np.ndarray:
    grid = _default_grid()
    R, T = _fd_points()
    errs = np.zeros((count, len(steps)))
    for i, c in enumerate(family.sample(d, grid, count, seed)):
        f = coefficient_field(c)
        exact = synthesize_grid(apply(SubLaplacian(), c), R[:, 0], T[0])
        scale = float(np.max(np.abs(exact)))
        for j, h in enumerate(steps):
            errs[i, j] = float(np.max(np.abs(fd_sublaplacian(f, R, T, h) - exact))) / scale
    return errs


def run_convention(
    d: int = 1, family: FieldFamily = RESOLVED_FAMILY, count: int = 10, seed: int = 0, h: float = 1e-3, tolerance: float = 1e-4
) -> VerificationReport:
    """Spectral L against the finite-difference sublaplacian at sample points."""
    with _Timer() as timer:
        errs = _fd_errors(d, family, count, seed, [h])
    return VerificationReport(
        "convention", {"d": d, "count": count, "seed": seed, "h": h}, float(np.max(errs)),
        tolerance=tolerance, kind="residual", runtime_ms=timer.ms,
    )


def run_fd_order(
    d: int = 1, family: FieldFamily = RESOLVED_FAMILY, count: int = 3, seed: int = 0, h: float = 4e-3, min_order: float = 1.8
) -> VerificationReport:
    """Observed order log2(e(h) / e(h/2)) of the finite-difference discrepancy (worst field)."""
    with _Timer() as timer:
        errs = _fd_errors(d, family, count, seed, [h, 0.5 * h])
        order = float(np.min(np.log2(errs[:, 0] / errs[:, 1])))
    return VerificationReport(
        "fd_order", {"d": d, "count": count, "seed": seed, "h": h}, order, min_order, 0.0, "lower", runtime_ms=timer.ms
    )


def run_ground_state_convention(d: int = 1, lam0: float = 1.5, h: float = 5e-4, tolerance: float = 1e-6) -> VerificationReport:
    """FD sublaplacian of exp(i lam0 t - |lam0| r^2) against 4 d |lam0| times the field."""
    f = ground_state_field(d, lam0)
    R, T = _fd_points()
    exact = float(eig_L(0, lam0, d)) * f(R, T)
    err = float(np.max(np.abs(fd_sublaplacian(f, R, T, h) - exact)) / np.max(np.abs(exact)))
    return VerificationReport("convention_ground_state", {"d": d, "lam0": lam0, "h": h}, err, tolerance=tolerance, kind="residual")


def run_homogeneity(
    s_list: Sequence[float] = (0.6, 1.0, 1.5),
    d: int = 1,
    steps: Sequence[int] = (-4, -1, 0, 1, 3, 8),
    count: int = 3,
    seed: int = 0,
    tolerance: float = 1e-12,
) -> VerificationReport:
    """Relative defect of H(dilate c) = exp(2 s tau) dilate(H c) for L^s and L_s."""
    with _Timer() as timer:
        grid = _default_grid()
        worst = 0.0
        for c in SPEC_FAMILY.sample(d, grid, count, seed):
            for s in s_list:
                ops = [SubLaplacian() if s == 1 else PureFractional(s)]
                if s < d + 1:
                    ops.append(Conformal(s))
                for op in ops:
                    for st in steps:
                        lhs = apply(op, dilate(st, c)).c
                        rhs = math.exp(2.0 * s * dilation_tau(st, grid)) * dilate(st, apply(op, c)).c
                        worst = max(worst, float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))))
    return VerificationReport(
        "homogeneity", {"d": d, "s": list(map(float, s_list)), "steps": list(steps)}, worst,
        tolerance=tolerance, kind="residual", runtime_ms=timer.ms,
    )


def roundtrip_grid(d: int) -> PhysicalGrid:
    return PhysicalGrid.build(d, lam_max=8.0, kmax=48)


def run_roundtrip(
    d_list: Sequence[int] = (1, 2, 3),
    count: int = 50,
    family: FieldFamily = SPEC_FAMILY,
    seed: int = 0,
    tolerance: float = 1e-8,
) -> VerificationReport:
    """max relative coefficient error of analyze(synthesize(c)) over seeded fields.

    ``count`` fields are split evenly across ``d_list``.
    """
    with _Timer() as timer:
        grid = _default_grid()
        worst = 0.0
        residual = 0.0
        per_d = [count // len(d_list) + (1 if i < count % len(d_list) else 0) for i in range(len(d_list))]
        for d, n in zip(d_list, per_d):
            pg = roundtrip_grid(d)
            for c in family.sample(d, grid, n, seed):
                back = analyze(coefficient_field(c), d, family.kmax, grid, pg, gate=None)
                worst = max(worst, float(np.linalg.norm(back.c - c.c) / np.linalg.norm(c.c)))
                residual = max(residual, back.residual)
    return VerificationReport(
        "roundtrip",
        {"d": list(d_list), "count": count, "kmax": family.kmax, "seed": seed},
        worst,
        tolerance=tolerance,
        kind="residual",
        residuals={"plancherel": residual},
        runtime_ms=timer.ms,
    )


def run_conformal_identity(d_list: Sequence[int] = (1, 2, 3), kmax: int = 64, tolerance: float = 1e-12) -> VerificationReport:
    """L_1 against the eigenvalues of L over the sampled joint spectrum."""
    grid = _default_grid()
    k = np.arange(kmax + 1)[:, None]
    worst = 0.0
    for d in d_list:
        ref = eig_L(k, grid.points[None, :], d)
        worst = max(worst, float(np.max(np.abs(multiplier(Conformal(1.0), k, grid.points[None, :], d) / ref - 1))))
    return VerificationReport("conformal_identity", {"d": list(d_list), "kmax": kmax}, worst, tolerance=tolerance, kind="residual")


def run_comparability(s: float = 0.75, d: int = 1, kmax: int = 64) -> VerificationReport:
    """Worst violation of c_s <= L_s / L^s <= C_s on the sampled spectrum (0 when it holds)."""
    cr = comparability_range(s, d)
    ratio = comparability_ratio(s, np.arange(kmax + 1), d)
    violation = float(max(np.max(cr.c_s - ratio), np.max(ratio - cr.C_s), 0.0))
    return VerificationReport(
        "comparability", {"s": s, "d": d, "c_s": cr.c_s, "C_s": cr.C_s}, violation, tolerance=0.0, kind="residual"
    )


def run_commutation(d: int = 1, seed: int = 0) -> VerificationReport:
    """Count of coefficients where A B c and B A c differ for two resolvents (bit-exact check)."""
    c = SPEC_FAMILY.sample(d, _default_grid(), 1, seed)[0]
    A = Resolvent(SubLaplacian(), 1 + 2j)
    B = Resolvent(Conformal(0.75), -0.5 + 0.1j)
    diff = int(np.count_nonzero(apply(A, apply(B, c)).c != apply(B, apply(A, c)).c))
    return VerificationReport("commutation", {"d": d, "seed": seed}, diff, tolerance=0.0, kind="residual")


# ----------------------------------------------------------------------------- constants


def run_dawson_checks() -> List[VerificationReport]:
    """D(1, .) against 1 - e^{-x}, D(2, 1) against direct quadrature, and the D(p, x) upper bound."""
    xs = np.linspace(0.0, 20.0, 1000)
    closed = max(abs(constants.dawson(1.0, x) + math.expm1(-x)) for x in xs)
    with mpmath.workdps(30):
        oracle = float(mpmath.exp(-1) * mpmath.quad(lambda u: mpmath.exp(u * u), [0, 1]))
    d21 = abs(constants.dawson(2.0, 1.0) - oracle)
    gap = -math.inf
    for p in np.linspace(1.0, 6.0, 101)[1:]:
        for x in np.linspace(0.01, 6.0, 100):
            gap = max(gap, constants.dawson(p, x) - x ** (1 - p) * -math.expm1(-(x**p)))
    return [
        VerificationReport("dawson_p1_closed_form", {"points": 1000}, closed, tolerance=1e-12, kind="residual"),
        VerificationReport("dawson_2_1_oracle", {"oracle": oracle}, d21, tolerance=1e-10, kind="residual"),
        VerificationReport(
            "dawson_upper_bound", {"p": "(1, 6] x 100", "x": "[0.01, 6] x 100"}, gap, 0.0, 0.0, "upper"
        ),
    ]


def run_dawson_value(p: float, x: float) -> VerificationReport:
    """D(p, x) against x^{1-p} (1 - exp(-x^p))."""
    val = constants.dawson(p, x)
    bound = x ** (1 - p) * -math.expm1(-(x**p)) if x > 0 else 0.0
    return VerificationReport("dawson", {"p": p, "x": x}, val, bound, 0.0, "upper")


def run_kappa(C1: float = 1.0, C2: float = 1.0, s: float = 1.0, mu: float = 1.0) -> List[VerificationReport]:
    """kappa against its closed-form bound and against the closed-form limit."""
    with _Timer() as timer:
        res = constants.kappa(constants.KappaInput(C1, C2, s, mu))
    params = {"C1": C1, "C2": C2, "s": s, "mu": mu, "b_star": res.b_star}
    return [
        VerificationReport("kappa", params, res.kappa, res.closed_bound, 0.0, "upper", runtime_ms=timer.ms),
        VerificationReport("kappa_vs_limit", params, res.kappa, constants.KAPPA_CLOSED_LIMIT, 0.0, "upper"),
    ]


def run_kappa_checks(values: Sequence[float] = (1.0, 0.9, 0.75, 0.6)) -> List[VerificationReport]:
    out = []
    for s in values:
        for mu in values:
            out.extend(run_kappa(1.0, 1.0, s, mu))
    return out


def run_bounds(d: int = 1, s: float = 1.0, mu: float = 1.0) -> List[VerificationReport]:
    """Resolvent bounds of each case available in dimension d."""
    out = []
    for case in ("I", "II", "III", "IV"):
        for H in ("pure", "conformal"):
            if H == "conformal" and s == 1:
                continue
            try:
                val = constants.resolvent_bound(case, d, s, mu, H)
            except DomainError:
                continue
            out.append(VerificationReport("bound", {"case": case, "d": d, "s": s, "mu": mu, "H": H}, val, kind="value"))
    return out


def run_thresholds(d: int = 1) -> List[VerificationReport]:
    out = []
    for case in ("I", "II"):
        try:
            val = constants.stability_threshold(case, d)
        except DomainError:
            continue
        out.append(VerificationReport("stability_threshold", {"case": case, "d": d}, val, kind="value"))
    return out


def run_gronwall(count: int = 100, seed: int = 0) -> VerificationReport:
    """Largest ratio of an ODE-integrated saturated solution to the Gronwall envelope."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        A, u1, c = rng.uniform(0, 3), rng.uniform(0, 2), rng.uniform(0.1, 3)
        mu = rng.uniform(0.55, 1.0)
        eps, b = rng.uniform(0.01, 0.3), rng.uniform(0.8, 3.0)
        theta = rng.uniform(0, 1)

        def rhs(r, y, c=c, mu=mu, u1=u1, theta=theta):
            return [-(u1 * y[0] + theta * c * r ** (mu - 1.5) * math.sqrt(max(y[0], 0.0)))]

        sol = solve_ivp(rhs, (b, eps), [A], method="DOP853", rtol=1e-11, atol=1e-13)
        if not sol.success:
            raise ResolutionError("ODE oracle failed")
        env = constants.gronwall_envelope(A, u1, lambda r, c=c, mu=mu: c * r ** (mu - 1.5), eps, b)
        worst = max(worst, sol.y[0, -1] / env if env > 0 else 0.0)
    return VerificationReport("gronwall", {"count": count, "seed": seed}, worst, 1.0, 1e-8, "upper")
