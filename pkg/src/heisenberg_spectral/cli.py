"""Command-line front end: run checks and constant computations, emit JSON or CSV reports.

Exit codes: 0 when every report passes, 1 when a check fails, 2 for usage
errors, 3 when a numerical resolution gate or an iteration fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from threadpoolctl import threadpool_limits

from . import __version__, verify
from .errors import DomainError, OptimizationError, ResolutionError
from .spectral import Conformal, PureFractional, SubLaplacian
from .verify import GaussianBump, GWeightSpec, VerificationReport

THREADS_ENV = "HEISENBERG_SPECTRAL_THREADS"

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_RESOLUTION = 0, 1, 2, 3

COMMANDS = (
    "dawson",
    "kappa",
    "bounds",
    "thresholds",
    "soliton",
    "hardy",
    "lemma43",
    "resolvent-sup",
    "smoothing",
    "stability",
    "roundtrip",
    "convention",
    "homogeneity",
    "all",
)

#: (d, case) pairs of the resolvent-sup sweep in ``all``; each runs with H = L, L^s and L_s at s = SWEEP_S.
RESOLVENT_SWEEP = ((1, "IV"), (1, "III"), (2, "IV"), (1, "I"), (2, "II"))
SWEEP_S = 0.75


# ----------------------------------------------------------------------------- configuration


@dataclass
class RunConfig:
    """Parsed and validated options of one invocation."""

    command: str
    d: int = 1
    s: float = 1.0
    mu: float = 1.0
    kmax: int = 48
    seed: int = 0
    count: Optional[int] = None
    fmt: str = "json"
    out: str = "-"
    timing: bool = False
    options: Dict[str, object] = field(default_factory=dict)

    def params(self) -> Dict[str, object]:
        out = {"d": self.d, "s": self.s, "mu": self.mu, "kmax": self.kmax, "seed": self.seed}
        if self.count is not None:
            out["count"] = self.count
        out.update({k: [_plain(x) for x in v] if isinstance(v, list) else _plain(v) for k, v in self.options.items()})
        return out


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _positive_int(text: str) -> int:
    val = int(text)
    if val <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text!r}")
    return val


def _h_operator(name: str, s: float):
    if name == "L":
        if s != 1:
            raise DomainError("H = L needs s = 1")
        return SubLaplacian()
    if name == "pure":
        return SubLaplacian() if s == 1 else PureFractional(s)
    if name == "conformal":
        return Conformal(s)
    raise DomainError(f"unknown H {name!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--out", default="-", help="output path, '-' for standard output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timing", action="store_true", help="record wall-clock runtimes (not reproducible)")

    parser = argparse.ArgumentParser(prog="heisenberg-spectral", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text, d=1):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if d is not None:
            p.add_argument("--d", type=_positive_int, default=d)
        return p

    p = add("dawson", "generalized Dawson integral D(p, x) or the full Dawson check set", d=None)
    p.add_argument("--p", type=float)
    p.add_argument("--x", type=float)

    p = add("kappa", "the constant kappa and its closed-form bounds", d=None)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--grid", action="store_true", help="sweep s, mu over {1, 0.9, 0.75, 0.6}")

    p = add("bounds", "resolvent bounds available in dimension d")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)

    add("thresholds", "stability thresholds of the w1 and w2 potentials")

    p = add("soliton", "transport of the explicit soliton at speed 4d")
    p.add_argument("--tau", type=float, nargs="+", default=[0.1, 0.5, 1.0])
    p.add_argument("--center", type=float, default=2.0)
    p.add_argument("--width", type=float, default=0.4)

    p = add("hardy", "Hardy quotients over seeded fields")
    p.add_argument("--which", choices=("W4", "InvZ"), default="W4")
    p.add_argument("--count", type=_positive_int, default=100)
    p.add_argument("--tail-gate", type=float, default=1e-2)

    p = add("lemma43", "||Tf|| / ||Lf|| and || |z| Tf || / ||L^1/2 f||")
    p.add_argument("--count", type=_positive_int, default=100)
    p.add_argument("--kmax", type=_positive_int, default=48)

    p = add("resolvent-sup", "weighted resolvent norms over a sigma-grid")
    p.add_argument("--case", choices=("I", "II", "III", "IV"), default="IV")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--H", dest="H", choices=("L", "pure", "conformal"), default="pure")
    p.add_argument("--count", type=_positive_int, default=50)
    p.add_argument("--n-sigma", type=_positive_int, default=25, help="moduli per ray (8 rays)")
    p.add_argument("--projection-gate", type=float, default=0.1)

    p = add("smoothing", "partial space-time integrals of the weighted evolution")
    p.add_argument("--case", choices=("I", "II", "III", "IV"), default="IV")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--H", dest="H", choices=("L", "pure", "conformal"), default="pure")
    p.add_argument("--tau-max", type=float, default=4.0)
    p.add_argument("--n-tau", type=_positive_int, default=801)

    p = add("stability", "Birman-Schwinger norm below the stability threshold")
    p.add_argument("--case", choices=("I", "II"), default="I")
    p.add_argument("--c-factor", type=float, default=0.5)
    p.add_argument("--sigma", type=_complex, nargs="+", default=[1j, 1 + 1j, 10 + 0.01j])
    p.add_argument("--power-iters", type=_positive_int, default=20000)

    p = add("roundtrip", "analyze after synthesize on seeded fields", d=None)
    p.add_argument("--d", type=_positive_int, nargs="+", default=[1, 2, 3])
    p.add_argument("--count", type=_positive_int, default=50)
    p.add_argument("--kmax", type=_positive_int, default=48)

    p = add("convention", "spectral L against finite differences")
    p.add_argument("--count", type=_positive_int, default=10)
    p.add_argument("--h", type=float, default=1e-3)

    p = add("homogeneity", "dilation covariance of L^s and L_s")
    p.add_argument("--s", type=float, nargs="+", default=[0.6, 1.0, 1.5])

    p = add("all", "every check in dependency order", d=None)
    p.add_argument("--quick", action="store_true", help="reduced counts and sigma-grid")
    return parser


def make_config(ns: argparse.Namespace) -> RunConfig:
    """Collect options and validate parameter constraints before anything runs."""
    cfg = RunConfig(ns.command, seed=ns.seed, fmt=ns.fmt, out=ns.out, timing=ns.timing)
    skip = {"command", "seed", "fmt", "out", "timing"}
    for key, val in vars(ns).items():
        if key in skip:
            continue
        if key in ("d", "s", "mu", "kmax", "count") and not isinstance(val, list):
            setattr(cfg, key, val)
        else:
            cfg.options[key] = val
    if ns.command == "roundtrip":
        cfg.d = ns.d[0]
    _validate(cfg)
    return cfg


def _plain(v):
    if isinstance(v, complex):
        return f"{v.real:.17g}{v.imag:+.17g}j"
    return v


def _validate(cfg: RunConfig) -> None:
    o = cfg.options
    if cfg.command == "dawson" and (o.get("p") is None) != (o.get("x") is None):
        raise DomainError("--p and --x go together")
    if cfg.command == "dawson" and o.get("p") is not None:
        if o["p"] < 1 or o["x"] < 0:
            raise DomainError("need p >= 1 and x >= 0")
    if cfg.command == "kappa" and not o.get("grid"):
        from .constants import KappaInput

        KappaInput(o["c1"], o["c2"], cfg.s, cfg.mu)
    if cfg.command in ("resolvent-sup", "smoothing"):
        G = GWeightSpec(o["case"], cfg.s, cfg.mu)
        G.check_dimension(cfg.d)
        _h_operator(o["H"], cfg.s)
    if cfg.command == "smoothing" and (o["tau_max"] <= 0 or o["n_tau"] < 3):
        raise DomainError("need --tau-max > 0 and --n-tau >= 3")
    if cfg.command == "stability":
        if not 0 <= o["c_factor"] <= 1:
            raise DomainError("--c-factor must lie in [0, 1]")
        if o["case"] == "II" and cfg.d < 2:
            raise DomainError("case II needs d >= 2")
        if any(complex(x).imag == 0 for x in o["sigma"]):
            raise DomainError("sigma must have nonzero imaginary part")
    if cfg.command == "soliton" and o["width"] <= 0:
        raise DomainError("--width must be positive")
    if cfg.command == "hardy" and o["which"] == "InvZ" and cfg.d < 2:
        raise DomainError("the |z|^-1 Hardy check needs d >= 2")
    if cfg.command == "convention" and o["h"] <= 0:
        raise DomainError("--h must be positive")
    if cfg.command == "homogeneity" and any(s <= 0 for s in o["s"]):
        raise DomainError("--s values must be positive")


# ----------------------------------------------------------------------------- dispatch


class _Runner:
    """Collects reports; resolution failures become failing reports and set a flag."""

    def __init__(self):
        self.reports: List[VerificationReport] = []
        self.resolution_failed = False

    def run(self, name: str, params: Dict[str, object], fn: Callable, *args, **kwargs) -> None:
        try:
            out = fn(*args, **kwargs)
        except (ResolutionError, OptimizationError) as exc:
            self.resolution_failed = True
            value = getattr(exc, "value", None)
            gate = getattr(exc, "gate", None)
            self.reports.append(
                VerificationReport(
                    name,
                    dict(params, error=str(exc)),
                    math.nan,
                    kind="residual",
                    residuals={"resolution": math.inf if value is None else float(value)},
                    gates={"resolution": math.nan if gate is None else float(gate)},
                )
            )
            return
        self.reports.extend(out if isinstance(out, list) else [out])


def _sigmas(o, n_mod=None):
    return verify.sigma_grid(n_modulus=n_mod or o.get("n_sigma", 25))


def _dispatch(cfg: RunConfig, runner: _Runner) -> None:
    o, d, seed = cfg.options, cfg.d, cfg.seed
    cmd = cfg.command
    if cmd == "dawson":
        if o.get("p") is None:
            runner.run("dawson", {}, verify.run_dawson_checks)
        else:
            runner.run("dawson", {}, verify.run_dawson_value, o["p"], o["x"])
    elif cmd == "kappa":
        if o.get("grid"):
            runner.run("kappa", {}, verify.run_kappa_checks)
        else:
            runner.run("kappa", {}, verify.run_kappa, o["c1"], o["c2"], cfg.s, cfg.mu)
    elif cmd == "bounds":
        runner.run("bounds", {}, verify.run_bounds, d, cfg.s, cfg.mu)
    elif cmd == "thresholds":
        runner.run("thresholds", {}, verify.run_thresholds, d)
    elif cmd == "soliton":
        g = GaussianBump(o["center"], o["width"])
        runner.run("soliton", {"d": d}, verify.run_soliton, d, g, tuple(o["tau"]))
    elif cmd == "hardy":
        runner.run(
            f"hardy_{o['which']}", {"d": d}, verify.run_hardy, d, o["which"],
            count=cfg.count, seed=seed, tail_gate=o["tail_gate"],
        )
    elif cmd == "lemma43":
        family = verify.FieldFamily(kmax=cfg.kmax)
        runner.run("lemma43", {"d": d}, verify.run_lemma43, d, family, cfg.count, seed)
    elif cmd == "resolvent-sup":
        H = _h_operator(o["H"], cfg.s)
        G = GWeightSpec(o["case"], cfg.s, cfg.mu)
        runner.run(
            "resolvent_sup", {"d": d}, verify.run_resolvent_sup, H, G, d, _sigmas(o), cfg.count, seed,
            projection_gate=o["projection_gate"],
        )
    elif cmd == "smoothing":
        H = _h_operator(o["H"], cfg.s)
        G = GWeightSpec(o["case"], cfg.s, cfg.mu)
        runner.run("smoothing", {"d": d}, verify.run_smoothing, H, G, d, None, o["tau_max"], o["n_tau"])
    elif cmd == "stability":
        for sigma in o["sigma"]:
            runner.run(
                "birman_schwinger", {"d": d}, verify.run_birman_schwinger, d, o["case"], o["c_factor"],
                complex(sigma), o["power_iters"],
            )
    elif cmd == "roundtrip":
        family = verify.FieldFamily(kmax=cfg.kmax)
        runner.run("roundtrip", {}, verify.run_roundtrip, tuple(o["d"]), cfg.count, family, seed)
    elif cmd == "convention":
        runner.run("convention", {"d": d}, verify.run_convention, d, verify.RESOLVED_FAMILY, cfg.count, seed, o["h"])
        runner.run("fd_order", {"d": d}, verify.run_fd_order, d, verify.RESOLVED_FAMILY, 3, seed)
        runner.run("convention_ground_state", {"d": d}, verify.run_ground_state_convention, d)
    elif cmd == "homogeneity":
        runner.run("homogeneity", {"d": d}, verify.run_homogeneity, tuple(o["s"]), d, seed=seed)
    elif cmd == "all":
        _run_all(cfg, runner)
    else:  # pragma: no cover - argparse restricts the choices
        raise DomainError(f"unknown command {cmd!r}")


def _run_all(cfg: RunConfig, runner: _Runner) -> None:
    """Constants, transforms, soliton, inequalities, resolvents, smoothing, stability."""
    quick = bool(cfg.options.get("quick"))
    seed = cfg.seed
    n_fields = 5 if quick else 100
    n_packets = 5 if quick else 50
    n_mod = 5 if quick else 25

    runner.run("dawson", {}, verify.run_dawson_checks)
    runner.run("kappa", {}, verify.run_kappa_checks)
    for d in (1, 2, 3):
        runner.run("bounds", {"d": d}, verify.run_bounds, d)
        runner.run("thresholds", {"d": d}, verify.run_thresholds, d)
    runner.run("gronwall", {}, verify.run_gronwall, 100, seed)

    runner.run("roundtrip", {}, verify.run_roundtrip, (1, 2, 3), 6 if quick else 50, verify.SPEC_FAMILY, seed)
    for d in (1, 2, 3):
        runner.run("convention", {"d": d}, verify.run_convention, d, verify.RESOLVED_FAMILY, 3 if quick else 10, seed)
        runner.run("fd_order", {"d": d}, verify.run_fd_order, d, verify.RESOLVED_FAMILY, 3, seed)
        runner.run("convention_ground_state", {"d": d}, verify.run_ground_state_convention, d)
        runner.run("homogeneity", {"d": d}, verify.run_homogeneity, (0.6, 1.0, 1.5), d, seed=seed)
    runner.run("conformal_identity", {}, verify.run_conformal_identity)
    for s, d in ((0.6, 1), (0.75, 2), (1.5, 1)):
        runner.run("comparability", {"s": s, "d": d}, verify.run_comparability, s, d)
    runner.run("commutation", {}, verify.run_commutation, 1, seed)

    for d in (1, 2):
        runner.run("soliton", {"d": d}, verify.run_soliton, d)

    for d in (1, 2, 3):
        runner.run("hardy_W4", {"d": d}, verify.run_hardy, d, "W4", count=n_fields, seed=seed)
    for d in (2, 3):
        runner.run("hardy_InvZ", {"d": d}, verify.run_hardy, d, "InvZ", count=n_fields, seed=seed)
    for d in (1, 2, 3):
        runner.run("lemma43", {"d": d}, verify.run_lemma43, d, verify.SPEC_FAMILY, n_fields, seed)

    sigmas = verify.sigma_grid(n_modulus=n_mod)
    for d, case in RESOLVENT_SWEEP:
        for H, s in ((SubLaplacian(), 1.0), (PureFractional(SWEEP_S), SWEEP_S), (Conformal(SWEEP_S), SWEEP_S)):
            G = GWeightSpec(case, s, 1.0 if case in ("I", "II") else s)
            runner.run(
                "resolvent_sup", {"d": d, "case": case}, verify.run_resolvent_sup, H, G, d, sigmas, n_packets, seed
            )

    runner.run("smoothing", {"d": 1}, verify.run_smoothing)

    for d, case in ((1, "I"), (2, "II")):
        for sigma in (1j, 1 + 1j, 10 + 0.01j):
            runner.run("birman_schwinger", {"d": d}, verify.run_birman_schwinger, d, case, 0.5, sigma)


# ----------------------------------------------------------------------------- serialization


def format_float(x) -> Optional[str]:
    """17 significant digits; None for non-finite values."""
    x = float(x)
    if not math.isfinite(x):
        return None
    return format(x, ".17g")


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        text = format_float(v)
        return "null" if text is None else text
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(val)}" for k, val in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    if hasattr(v, "item"):  # numpy scalar
        return _json_value(v.item())
    return json.dumps(str(v))


def _report_dict(r: VerificationReport, timing: bool) -> Dict[str, object]:
    d = r.as_dict()
    if not timing:
        d["runtime_ms"] = 0
    return d


def serialize_report(
    reports: Sequence[VerificationReport], fmt: str = "json", command: str = "", params=None, timing: bool = False,
    runtime_ms: int = 0,
) -> bytes:
    """Render reports as JSON or CSV; both share one float formatter."""
    if not reports:
        raise DomainError("nothing to serialize")
    rows = [_report_dict(r, timing) for r in reports]
    if fmt == "json":
        doc = {
            "version": __version__,
            "command": command,
            "params": dict(params or {}),
            "results": rows,
            "runtime_ms": runtime_ms if timing else 0,
        }
        return (_json_value(doc) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = ["name", "kind", "measured", "bound", "tolerance", "margin", "pass", "residuals", "gates", "params", "runtime_ms"]
        writer.writerow(cols)
        for row in rows:
            writer.writerow(
                [
                    row["name"],
                    row["kind"],
                    _csv_num(row["measured"]),
                    _csv_num(row["bound"]),
                    _csv_num(row["tolerance"]),
                    _csv_num(row["margin"]),
                    "true" if row["pass"] else "false",
                    _csv_map(row["residuals"]),
                    _csv_map(row["gates"]),
                    _csv_map(row["params"]),
                    row["runtime_ms"],
                ]
            )
        return buf.getvalue().encode()
    raise DomainError(f"unknown format {fmt!r}")


def _csv_num(x) -> str:
    text = format_float(x)
    return "" if text is None else text


def _csv_map(m: Dict[str, object]) -> str:
    return ";".join(f"{k}={_json_value(v)}" for k, v in m.items())


def _write(data: bytes, out: str) -> None:
    if out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        with open(out, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write report to {out!r}: {exc.strerror or exc}") from exc


# ----------------------------------------------------------------------------- entry point


def _thread_limit() -> Optional[int]:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if n <= 0:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def parse_and_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        cfg = make_config(ns)
        threads = _thread_limit()
    except DomainError as exc:
        print(f"heisenberg-spectral {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    runner = _Runner()
    start = time.perf_counter()
    try:
        with threadpool_limits(limits=threads):
            _dispatch(cfg, runner)
    except DomainError as exc:
        print(f"heisenberg-spectral {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    elapsed = int(round(1000 * (time.perf_counter() - start)))
    data = serialize_report(runner.reports, cfg.fmt, cfg.command, cfg.params(), cfg.timing, elapsed)
    try:
        _write(data, cfg.out)
    except OSError as exc:
        print(f"heisenberg-spectral: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if runner.resolution_failed:
        return EXIT_RESOLUTION
    return EXIT_PASS if all(r.passed for r in runner.reports) else EXIT_FAIL


def main() -> None:
    sys.exit(parse_and_dispatch())
