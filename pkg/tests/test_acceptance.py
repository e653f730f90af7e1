"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary under "acceptance criteria".
"""

import csv
import io
import math
import time

import numpy as np
import pytest

from exec_hyper.cli import CliConfig, run_shoot_plot
from exec_hyper.model import ModelParams
from exec_hyper.solver import (
    closed_form_k1,
    solve,
    solve_v0,
    x_at_time,
    zero_speed_admissible,
    zero_speed_x,
    zero_speed_x0,
)
from exec_hyper.specfun import Hyp2F1Params, hyp2f1, hyp2f1_quadrature, hyp2f1_value
from exec_hyper.verify import cross_validate, integrate_first_order

from conftest import ACCEPTANCE_RESULTS, K_SWEEP

REFERENCE_V0 = 0.671525


def record(cid, ok, detail):
    ACCEPTANCE_RESULTS.append((cid, bool(ok), detail))
    assert ok, detail


@pytest.fixture(scope="module")
def solved():
    start = time.perf_counter()
    reports = {k: solve(ModelParams(k=k), 101) for k in K_SWEEP}
    return reports, time.perf_counter() - start


def test_c01_reference_terminal_speed():
    start = time.perf_counter()
    v0 = solve_v0(ModelParams(k=0.5)).v0
    elapsed = time.perf_counter() - start
    err = abs(v0 - REFERENCE_V0)
    record(1, err <= 1e-5 and elapsed < 1.0, f"v0={v0:.9f} |v0-0.671525|={err:.2e} (<=1e-5), {elapsed:.3f}s (<1s)")


def test_c02_k1_equivalence():
    p = ModelParams(k=1)
    start = time.perf_counter()
    v0 = solve_v0(p).v0
    dev = max(abs(x_at_time(p, v0, float(t)) - closed_form_k1(p, float(t))) for t in np.linspace(0, 1, 101))
    elapsed = time.perf_counter() - start
    v0_err = abs(v0 - 1 / math.sinh(1))
    record(
        2,
        dev < 1e-7 and v0_err < 1e-8 and elapsed < 1.0,
        f"max|x-sinh form|={dev:.2e} (<1e-7), |v0-1/sinh1|={v0_err:.2e} (<1e-8), {elapsed:.3f}s (<1s)",
    )


def test_c03_arcsinh_identity():
    zs = np.linspace(0.2, 10.0, 50)
    worst = max(abs(hyp2f1_value(0.5, 0.5, 1.5, -z * z) - math.asinh(z) / z) for z in zs)
    record(3, worst < 1e-10, f"max|2F1(1/2,1/2;3/2;-z^2)-asinh(z)/z| over 50 z={worst:.2e} (<1e-10)")


def test_c04_series_quadrature_oracle():
    worst = 0.0
    for k in K_SWEEP:
        for t in (-50, -10, -5, -1, -0.5, -0.01, 0):
            p = Hyp2F1Params(0.5, 1 / (k + 1), 1.5, float(t))
            worst = max(worst, abs(hyp2f1(p).value - hyp2f1_quadrature(p)))
    record(4, worst < 1e-8, f"max|series-quadrature| on 5x7 grid={worst:.2e} (<1e-8)")


def _derivative(f, t, h=1e-3):
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)


def test_c05_zero_speed_case():
    inadmissible = [k for k in (0.25, 0.5, 1.0) if zero_speed_admissible(ModelParams(k=k))]
    p = ModelParams(k=2)
    x0_err = abs(zero_speed_x0(p) - 1 / 54)
    residual = 0.0
    for t in np.linspace(0, 1, 102)[1:-1]:
        x = zero_speed_x(p, float(t))
        xdot = _derivative(lambda s: zero_speed_x(p, s), float(t))
        residual = max(residual, abs(xdot + (p.risk_ratio * x * x) ** (1 / (p.k + 1))))
    record(
        5,
        not inadmissible and x0_err < 1e-12 and residual < 1e-8,
        f"admissible for k<=1: {inadmissible or 'none'}, |x0-1/54|={x0_err:.2e} (<1e-12), "
        f"ODE residual at 100 points={residual:.2e} (<1e-8)",
    )


def test_c06_boundary_conditions(solved):
    reports, elapsed = solved
    x0_err = max(abs(r.trajectory.points[0].x - 1.0) for r in reports.values())
    xT_err = max(abs(r.trajectory.points[-1].x) for r in reports.values())
    record(
        6,
        x0_err < 1e-6 and xT_err < 1e-9 and elapsed < 10.0,
        f"max|x(0)-X|={x0_err:.2e} (<1e-6), max|x(T)|={xT_err:.2e} (<1e-9), {elapsed:.2f}s (<10s)",
    )


def test_c07_beltrami_conservation(solved):
    reports, _ = solved
    worst = 0.0
    for k, r in reports.items():
        p = r.params
        c_term = k * p.eta * r.v0 ** (k + 1)
        for pt in r.trajectory.points:
            worst = max(worst, abs(p.lam * p.sigma**2 * pt.x**2 - k * p.eta * pt.v ** (k + 1) + c_term))
    record(7, worst < 1e-6, f"max Beltrami residual over 5 k={worst:.2e} (<1e-6)")


def test_c08_oracle_agreement(solved):
    reports, _ = solved
    devs = {k: cross_validate(ModelParams(k=k), reports[k], 4096) for k in (0.5, 1.0, 8.0)}
    p = ModelParams(k=1)
    v0 = 1 / math.sinh(1)
    e_coarse = abs(integrate_first_order(p, v0, 32).x_values[0] - 1.0)
    e_fine = abs(integrate_first_order(p, v0, 64).x_values[0] - 1.0)
    ratio = e_coarse / e_fine
    worst = max(devs.values())
    record(
        8,
        worst < 1e-5 and 8 <= ratio <= 32,
        f"max RK4 deviation (k=1/2,1,8)={worst:.2e} (<1e-5), RK4 halving ratio={ratio:.2f} (in [8,32])",
    )


def test_c09_gamma_invariance():
    a = solve(ModelParams(k=0.5, gamma=0.0), 101)
    b = solve(ModelParams(k=0.5, gamma=5.0), 101)
    same = a.shooting == b.shooting and a.trajectory.points == b.trajectory.points
    diff = b.cost - a.cost
    record(
        9,
        same and abs(diff - 2.5) < 1e-6,
        f"identical outputs={same}, cost difference={diff:.10f} (2.5 +- 1e-6)",
    )


def test_c10_shooting_curve_data():
    cfg = CliConfig("shoot-plot", ModelParams(k=0.5), n_samples=201, format="csv")
    status, text = run_shoot_plot(cfg)
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    data = [(float(r["v0"]), float(r["lhs"])) for r in csv.DictReader(io.StringIO("\n".join(lines)))]
    decreasing = all(b[1] < a[1] for a, b in zip(data, data[1:]))
    crossing = next(
        (a[0], b[0]) for a, b in zip(data, data[1:]) if a[1] >= 1.0 >= b[1]
    )
    brackets = crossing[0] <= REFERENCE_V0 + 1e-5 and crossing[1] >= REFERENCE_V0 - 1e-5
    record(
        10,
        status == 0 and decreasing and brackets,
        f"lhs strictly decreasing={decreasing}, lhs=T crossed in [{crossing[0]:.6f}, {crossing[1]:.6f}]",
    )
