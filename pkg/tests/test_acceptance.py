"""Acceptance suite: one check per numbered criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` or directly with
``python tests/test_acceptance.py``.  Failures are reported as they are
measured; see the project notes for the analysis of the known ones.
"""

import json
import math
import subprocess
import sys
import time

import pytest

from heisenberg_spectral import constants
from heisenberg_spectral.spectral import Conformal, PureFractional, SubLaplacian
from heisenberg_spectral.verify import (
    RESOLVED_FAMILY,
    SPEC_FAMILY,
    GWeightSpec,
    run_birman_schwinger,
    run_commutation,
    run_comparability,
    run_conformal_identity,
    run_convention,
    run_dawson_checks,
    run_fd_order,
    run_gronwall,
    run_hardy,
    run_homogeneity,
    run_kappa,
    run_lemma43,
    run_resolvent_sup,
    run_roundtrip,
    run_smoothing,
    run_soliton,
    sigma_grid,
)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def _failed(reports):
    return [f"{r.name}{r.params} measured={r.measured:.6g} bound={r.bound:.6g}" for r in reports if not r.passed]


def criterion_1():
    with Timer() as tm:
        kappa, _ = run_kappa(1.0, 1.0, 1.0, 1.0)
    ok = abs(kappa.measured - 6.42686) <= 5e-4 and tm.seconds < 1.0
    return ok, f"kappa={kappa.measured:.6f} runtime={tm.seconds:.2f}s"


def criterion_2():
    values = (1.0, 0.9, 0.75, 0.6)
    with Timer() as tm:
        reports = [r for s in values for mu in values for r in run_kappa(1.0, 1.0, s, mu)]
    closed = [r for r in reports if r.name == "kappa"]
    limit = [r for r in reports if r.name == "kappa_vs_limit"]
    n_closed = sum(r.passed for r in closed)
    n_limit = sum(r.passed for r in limit)
    worst = max(limit, key=lambda r: r.measured)
    ok = n_closed == len(closed) and n_limit == len(limit) and tm.seconds < 10.0
    return ok, (
        f"below closed bound {n_closed}/{len(closed)}, below {constants.KAPPA_CLOSED_LIMIT:.6f} {n_limit}/{len(limit)} "
        f"(largest kappa {worst.measured:.4g} at s={worst.params['s']}, mu={worst.params['mu']}) runtime={tm.seconds:.1f}s"
    )


def criterion_3():
    reports = run_dawson_checks()
    return all(r.passed for r in reports), "; ".join(f"{r.name}={r.measured:.3g}" for r in reports)


def criterion_4():
    with Timer() as tm:
        rep = run_roundtrip((1, 2, 3), 50, SPEC_FAMILY, 0, tolerance=1e-8)
    ok = rep.passed and tm.seconds < 30.0
    return ok, f"max relative error {rep.measured:.3g} (tolerance 1e-8) runtime={tm.seconds:.1f}s"


def criterion_5():
    with Timer() as tm:
        reports = [run_soliton(d, tau_list=(0.1, 0.5, 1.0)) for d in (1, 2)]
    ok = all(r.passed for r in reports) and tm.seconds < 60.0
    worst = max(r.measured for r in reports)
    oracle = max(r.residuals["oracle"] for r in reports)
    return ok, f"max sup-error {worst:.3g}, oracle residual {oracle:.3g} runtime={tm.seconds:.1f}s"


def criterion_6():
    reports = [run_convention(1, RESOLVED_FAMILY, 10, 0, h=1e-3, tolerance=1e-4), run_fd_order(1)]
    return all(r.passed for r in reports), f"FD discrepancy {reports[0].measured:.3g}, observed order {reports[1].measured:.3f}"


def criterion_7():
    reports = [run_hardy(d, "W4", count=100) for d in (1, 2, 3)] + [run_hardy(d, "InvZ", count=100) for d in (2, 3)]
    detail = ", ".join(f"{r.name} d={r.params['d']}: {r.measured:.4f}/{r.bound:.4f}" for r in reports)
    return all(r.passed for r in reports), detail


def criterion_8():
    reports = [r for d in (1, 2, 3) for r in run_lemma43(d, SPEC_FAMILY, 100, 0)]
    t_max = max(r.measured for r in reports if r.name == "lemma43_T")
    rt_max = max(r.measured for r in reports if r.name == "lemma43_rT")
    return all(r.passed for r in reports), f"max ||Tf||/||Lf|| {t_max:.6f}, max ||rTf||/||L^1/2 f|| {rt_max:.6f}"


def criterion_9():
    rep = run_conformal_identity((1, 2, 3))
    return rep.passed, f"max relative defect {rep.measured:.3g}"


def criterion_10():
    reports = [run_homogeneity((0.6, 1.0, 1.5), d) for d in (1, 2)]
    reports += [run_comparability(s, d) for s, d in ((0.6, 1), (1.5, 1), (0.75, 2), (1.5, 2))]
    reports.append(run_commutation())
    detail = f"homogeneity {max(r.measured for r in reports[:2]):.3g}, comparability violation " \
             f"{max(r.measured for r in reports[2:-1]):.3g}, commutation mismatches {int(reports[-1].measured)}"
    return all(r.passed for r in reports), detail


RESOLVENT_CONFIGS = ((1, "IV"), (1, "III"), (2, "IV"), (1, "I"), (2, "II"))


def criterion_11():
    sigmas = sigma_grid(25)
    assert len(sigmas) == 200
    reports = []
    with Timer() as tm:
        for d, case in RESOLVENT_CONFIGS:
            for H, s in ((SubLaplacian(), 1.0), (PureFractional(0.75), 0.75), (Conformal(0.75), 0.75)):
                G = GWeightSpec(case, s, 1.0 if case in ("I", "II") else s)
                reports.append(run_resolvent_sup(H, G, d, sigmas, 50, 0))
    ok = all(r.passed for r in reports) and tm.seconds < 600.0
    tightest = min(reports, key=lambda r: r.bound - r.measured)
    failed = _failed(reports)
    return ok, (
        f"{len(reports) - len(failed)}/{len(reports)} configurations below bound, tightest "
        f"{tightest.measured:.4g}/{tightest.bound:.4g} ({tightest.params['case']}, d={tightest.params['d']}, "
        f"{tightest.params['H']}), max projection residual {max(r.residuals['projection'] for r in reports):.3f} "
        f"runtime={tm.seconds:.0f}s"
    )


def criterion_12():
    with Timer() as tm:
        rep = run_smoothing()
    ok = rep.passed and tm.seconds < 120.0
    return ok, (
        f"partials {rep.params['partial_tau_max']:.5f} -> {rep.params['partial_2tau_max']:.5f} "
        f"(growth {rep.residuals['growth']:.3%}) below reference {rep.bound:.4g} runtime={tm.seconds:.1f}s"
    )


def criterion_13():
    ok = True
    worst = 0.0
    scaling = 0.0
    for d, case in ((1, "I"), (2, "II")):
        for sigma in (1j, 1 + 1j, 10 + 0.01j):
            full = run_birman_schwinger(d, case, 0.5, sigma)
            half = run_birman_schwinger(d, case, 0.25, sigma)
            ok &= full.passed and full.measured < 1.0
            worst = max(worst, full.measured)
            scaling = max(scaling, abs(full.measured / (2.0 * half.measured) - 1.0))
    ok &= scaling <= 1e-8
    return ok, f"max norm {worst:.4g} (< 1 required), coupling linearity defect {scaling:.2g}"


def criterion_14():
    rep = run_gronwall(100, 0)
    return rep.passed, f"max solution/envelope {rep.measured:.6f}"


def criterion_15():
    cmd = [sys.executable, "-m", "heisenberg_spectral", "all", "--quick", "--seed", "0"]
    runs = [subprocess.run(cmd, capture_output=True, check=False) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout
    valid = bool(json.loads(runs[0].stdout)["results"])
    codes = {r.returncode for r in runs}
    return same and valid, f"identical={same}, bytes={len(runs[0].stdout)}, exit codes {sorted(codes)}"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 16)}


def _line(n, ok, detail):
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for n, fn in CRITERIA.items():
        ok, detail = fn()
        failures += not ok
        print(_line(n, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
