"""Acceptance criteria: one test (one pass/fail line under pytest -v) per
criterion, with stated tolerances and runtime budgets.

Each test prints a summary line "criterion NN PASS/FAIL: ..." so a plain
``pytest -v -s`` run shows both the pytest verdict and the measured numbers.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from codazzi import diagnostics, embedding, fileio, solver, teich, verify
from codazzi.energy import (
    curvature_identity_residual,
    energy_gradient,
    flow_derivative_fd,
    gradient_pairing4,
    modified_inequality_check,
    second_variation,
    trace_energy,
)
from codazzi.grid import ConformalMetric, Grid, poincare_disk
from codazzi.jcalc import ID2, metric_action
from codazzi.manufactured import ManufacturedDiffeo, pullback_of_scaled_poincare, recovery_error
from codazzi.maps import FieldInterpolator, pullback_metric
from codazzi.operators import brioschi_curvature, curvature, frame_identity_crosscheck
from codazzi.randfields import (
    bump,
    random_displacement,
    rng_for,
    tracefree_codazzi_conformal,
    trig_endo,
    trig_scalar,
    trig_spd,
)


def _disk(n, l=0.8):
    return poincare_disk(Grid(n, n, l, l, "dirichlet"))


def _report(num, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {num:02d} {status}: {detail}")
    assert ok, detail


def test_criterion_01_jcalc_exactness():
    t0 = time.perf_counter()
    checks = verify.suite_jcalc(seed=0)
    elapsed = time.perf_counter() - t0
    by_name = {c["check"]: c for c in checks}
    core = (
        "sigma_frobenius_oracle",
        "sigma_rotation_invariance",
        "antisymmetric_part_relation",
        "adjugate_relation",
    )
    ok = all(by_name[n]["pass"] for n in core) and elapsed < 5.0
    worst = max(by_name[n]["residual"] for n in core)
    _report(1, ok, f"J-calculus oracles on 1e5 matrices, worst residual "
                   f"{worst:.2e}, {elapsed:.2f}s")


def test_criterion_02_frame_identity_refinement():
    t0 = time.perf_counter()
    ratios = []
    for k in range(10):
        def resid(n):
            grid = Grid(n, n, 1.0, 1.0, "periodic")
            g = ConformalMetric(grid, trig_scalar(grid, rng_for(k + 101), amp=0.3))
            a = trig_endo(grid, rng_for(k + 202), amp=1.0)
            return frame_identity_crosscheck(a, g)

        ratios.append(resid(32) / resid(64))
    elapsed = time.perf_counter() - t0
    ok = min(ratios) >= 3.5 and elapsed < 10.0
    _report(2, ok, f"frame identity 32^2 -> 64^2 ratio over 10 seeds: min "
                   f"{min(ratios):.2f}, {elapsed:.2f}s")


def test_criterion_03_energy_gradient():
    t0 = time.perf_counter()
    g = _disk(64)
    cut = bump(g.grid) ** 2
    worst = 0.0
    for k in range(5):
        a = trig_spd(g.grid, rng_for(11 + k), amp=0.12, kmax=1)
        h = metric_action(a, g.matrix())
        x = cut[..., None] * energy_gradient(h, g)
        x = 0.3 * x / np.max(np.abs(x))
        fd = flow_derivative_fd(h, g, x)
        pair = gradient_pairing4(h, g, x)
        worst = max(worst, abs(fd - pair) / abs(pair))
    zero = float(np.max(np.abs(energy_gradient(2.25 * g.matrix(), g))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-3 and zero <= 1e-10 and elapsed < 30.0
    _report(3, ok, f"gradient FD vs weak pairing: worst rel {worst:.2e} over "
                   f"5 seeds, conformal zero {zero:.2e}, {elapsed:.2f}s")


def test_criterion_04_second_variation():
    g = _disk(64)
    assert np.max(curvature(g)) < 0.0
    h = 2.25 * g.matrix()
    x = random_displacement(g.grid, rng_for(31), amp=0.3, kmax=1)
    hi = FieldInterpolator(g.grid, h)
    eps = 1e-3

    def e_at(t):
        return trace_energy(pullback_metric(g.grid, hi, x, t=t), g)

    fd2 = (e_at(eps) - 2.0 * e_at(0.0) + e_at(-eps)) / eps**2
    sv = second_variation(h, g, x)
    rel = abs(fd2 - sv) / abs(sv)
    values = [
        second_variation(h, g, random_displacement(g.grid, rng_for(41 + k), amp=0.3, kmax=2))
        for k in range(20)
    ]
    ok = rel <= 1e-2 and min(values) > 0.0
    _report(4, ok, f"second variation FD rel {rel:.2e}, min over 20 seeded "
                   f"directions {min(values):.3e} (all > 0)")


def test_criterion_05_curvature_identity():
    def resid(n):
        g = _disk(n)
        a = np.broadcast_to(1.4 * ID2, (n, n, 2, 2)).copy()
        a = a + tracefree_codazzi_conformal(g, rng_for(51), amp=0.25)
        return curvature_identity_residual(a, g, margin=max(3, n // 8))

    order = float(np.log2(resid(32) / resid(64)))
    grid = Grid(64, 64, 2.0, 2.0, "dirichlet")
    dif = ManufacturedDiffeo.seeded(grid, 11, amp=0.01)
    xx, yy = grid.meshgrid()
    jac = dif.jacobian(xx, yy)
    kflat = brioschi_curvature(grid, np.swapaxes(jac, -1, -2) @ jac)
    flat_resid = float(np.max(np.abs(kflat[grid.interior(3)])))
    ok = order >= 1.8 and flat_resid <= 1e-3
    _report(5, ok, f"curvature identity order {order:.2f}, flat-pullback "
                   f"kappa[h] residual {flat_resid:.2e}")


def test_criterion_06_modified_inequality():
    g = _disk(32)
    cut = bump(g.grid)
    worst_margin = np.inf
    fails = 0
    for k in range(50):
        e = trig_endo(g.grid, rng_for(500 + k), amp=0.2)
        e = 0.5 * (e + np.swapaxes(e, -1, -2))
        a = np.broadcast_to(ID2, e.shape).copy() + cut[..., None, None] * e
        h = metric_action(a, g.matrix())
        lhs, rhs = modified_inequality_check(h, g)
        slack = 1e-8 + 1e-2 * abs(rhs)
        worst_margin = min(worst_margin, lhs - rhs + slack)
        if lhs < rhs - slack:
            fails += 1
    ok = fails == 0
    _report(6, ok, f"modified inequality on 50 seeds: {fails} failures, "
                   f"worst margin {worst_margin:.3e}")


def test_criterion_07_one_harmonic_recovery():
    t0 = time.perf_counter()
    grid = Grid(32, 32, 0.8, 0.8, "dirichlet")
    g = poincare_disk(grid)
    diffeo = ManufacturedDiffeo.seeded(grid, 0)
    h = pullback_of_scaled_poincare(diffeo, grid)
    x, rep = solver.newton_solve(g, h, tol=1e-9)
    rec = float(recovery_error(diffeo, grid, x))
    contraction = rep.residuals[-1] / rep.residuals[-2]
    try:
        solver.continuation_solve(g, g, g.matrix(), h, steps=10, tol=1e-8)
        continuation_ok = True
    except solver.SolverError:
        continuation_ok = False
    elapsed = time.perf_counter() - t0
    ok = rec <= 1e-4 and contraction <= 0.5 and continuation_ok and elapsed < 300.0
    _report(7, ok, f"recovery {rec:.2e}, terminal contraction {contraction:.2f}, "
                   f"10-step continuation {'ok' if continuation_ok else 'UNDERFLOW'}, "
                   f"{elapsed:.1f}s")


def test_criterion_08_teich_variation():
    checks = verify.suite_teich(seed=0, n1=32, n2=64)
    by_name = {c["check"]: c for c in checks}
    need = (
        "phi0_nonnegative",
        "first_derivative_fd",
        "first_derivative_general",
        "second_derivative_lower_bound",
        "second_derivative_rhs_positive",
    )
    ok = all(by_name[n]["pass"] for n in need)
    _report(8, ok, "phi0 >= -1e-10, first derivative within 1e-2 of FD, FD "
                   "second derivative positive and above the lower bound")


def test_criterion_09_embedding():
    checks = verify.suite_embed(seed=0, n1=32, n2=64)
    by_name = {c["check"]: c for c in checks}
    need = (
        "identity_reproduces_hyperboloid",
        "plaquette_defect",
        "induced_metric_error",
        "support_sum_equals_f",
        "equivariance_hyperboloid_boost",
        "equivariance_rotation_invariant",
    )
    ok = all(by_name[n]["pass"] for n in need)
    _report(9, ok, "hyperboloid to 1e-10, plaquette/metric/support defects "
                   "O(h^2), equivariance residual O(h^2)")


def test_criterion_10_appendix():
    checks = verify.suite_appendix(seed=0)
    by_name = {c["check"]: c for c in checks}
    need = (
        "beltrami_chart_composition",
        "geodesic_ode_residual",
        "b_form_conjugation_invariance",
        "domain_trace_det_identities",
    )
    ok = all(by_name[n]["pass"] for n in need)
    _report(10, ok, "chart composition 1e-14, geodesic ODE 1e-6, b-form "
                    "conjugation 1e-12, domain trace/det identities exact")


def test_criterion_11_diagnostics():
    checks = verify.suite_diagnostics(seed=0, n1=32, n2=64)
    by_name = {c["check"]: c for c in checks}
    need = (
        "intermediate_J_squares_to_minus_id",
        "alpha_harmonic_codazzi",
        "alpha_harmonic_negative_control",
        "energy_identity_relative",
        "mod_upper_hand_value",
    )
    ok = all(by_name[n]["pass"] for n in need)
    _report(11, ok, "J-hat^2 = -Id to 1e-12, alpha-harmonic O(h^2) with "
                    "negative control, energy identity, collar hand values")


def test_criterion_12_cli_determinism(tmp_path):
    def run(*argv):
        return subprocess.run(
            [sys.executable, "-m", "codazzi.cli", *map(str, argv)],
            cwd=tmp_path, capture_output=True, text=True,
        )

    r1 = run("verify", "--suite", "all", "--seed", "0", "--out", "a.json")
    r2 = run("verify", "--suite", "all", "--seed", "0", "--out", "b.json")
    identical = (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    # failure injections exercising the exit contract
    g = poincare_disk(Grid(16, 16, 0.8, 0.8, "dirichlet"))
    xx, yy = g.grid.meshgrid()
    a = np.broadcast_to(ID2, (16, 16, 2, 2)).copy()
    a[..., 0, 0] += 2.0 * np.sin(5 * xx) * np.cos(4 * yy)
    fileio.save_field(tmp_path / "inject.json", g, endo=a)
    r_fail = run("verify", "--suite", "jcalc", "--g", "inject.json",
                 "--out", "c.json")
    doc = json.loads((tmp_path / "inject.json").read_text())
    del doc["phi"]
    (tmp_path / "broken.json").write_text(json.dumps(doc))
    r_io = run("verify", "--suite", "jcalc", "--g", "broken.json")
    r_usage = run("solve")

    ok = (
        r1.returncode == 0 and r2.returncode == 0 and identical
        and r_fail.returncode == 1 and r_io.returncode == 2
        and r_usage.returncode == 2
    )
    _report(12, ok, f"byte-identical={identical}, exits: pass={r1.returncode}, "
                    f"check-failure={r_fail.returncode}, io={r_io.returncode}, "
                    f"usage={r_usage.returncode}")
