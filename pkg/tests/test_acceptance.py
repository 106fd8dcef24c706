"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected into the pytest terminal summary.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest
from scipy.special import erfcx

from conftest import ACCEPTANCE
from inverse_source.experiment import ExperimentConfig, compare_energy, rod_lphi, rod_profile
from inverse_source.forward import SpaceGrid, forward_fd_heat, forward_l1_subdiffusion, verify_reconstruction
from inverse_source.inverse import ProblemData, evaluate_f, evaluate_u, solve, solve_heat
from inverse_source.mittag_leffler import ml_neg
from inverse_source.operators import (
    apply_operator,
    dirichlet_laplacian,
    harmonic_oscillator_1d,
    involution,
    l2_norm,
    synthesize,
)

pytestmark = pytest.mark.acceptance


def report(n: int, title: str, checks: dict[str, bool], elapsed: float, budget: float, detail: str):
    checks = {**checks, f"runtime {elapsed:.2f}s < {budget:g}s": elapsed < budget}
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    text = detail if ok else f"{detail}; failed: {', '.join(failed)}"
    ACCEPTANCE[n] = (title, ok, text)
    print(f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title}: {text}")
    assert ok, text


def rod_data(sys, alpha=1.0):
    phi = rod_profile(sys.nodes)
    return ProblemData(phi, np.zeros_like(phi), 5.0, alpha)


def test_criterion_1_mittag_leffler():
    start = time.perf_counter()
    x = np.linspace(0.0, 50.0, 1001)
    exp_ok = bool(np.all(np.abs(ml_neg(1.0, x) - np.exp(-x)) <= 1e-12 * np.exp(-x)))
    x = np.linspace(0.0, 10.0, 1001)
    half_err = float(np.max(np.abs(ml_neg(0.5, x) - erfcx(x)) / erfcx(x)))
    alphas = np.linspace(0.1, 0.9, 9)
    xs = np.logspace(-3, 3, 60)
    simon_ok = True
    for a in alphas:
        g = math.gamma(1.0 - a)
        v = ml_neg(a, xs)
        lower, upper = 1.0 / (1.0 + g * xs), 1.0 / (1.0 + xs / g)
        simon_ok &= bool(np.all((v >= lower) & (v <= upper)))
    elapsed = time.perf_counter() - start
    report(
        1,
        "Mittag-Leffler correctness",
        {"alpha=1 vs exp": exp_ok, "alpha=1/2 vs erfcx": half_err <= 1e-8, "Simon bounds 9x60": simon_ok},
        elapsed,
        1.0,
        f"erfcx rel err {half_err:.1e}, Simon grid {'ok' if simon_ok else 'violated'}",
    )


def test_criterion_2_structural_identities():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    systems = [dirichlet_laplacian(), involution(0.9), harmonic_oscillator_1d()]
    worst0 = worstT = worst_heat = 0.0
    for sys in systems:
        for i in range(100):
            phi = synthesize(sys, rng.normal(size=20))
            psi = synthesize(sys, rng.normal(size=20))
            T = float(rng.uniform(0.5, 5.0))
            alpha = 1.0 if i % 2 == 0 else float(rng.uniform(0.2, 0.95))
            data = ProblemData(phi, psi, T, alpha)
            sol = solve(sys, data, 20)
            worst0 = max(worst0, float(np.max(np.abs(evaluate_u(sol, 0.0) - phi))))
            worstT = max(worstT, l2_norm(sys, evaluate_u(sol, T) - psi))
            if alpha == 1.0:
                heat = solve_heat(sys, data, 20)
                for a, b in ((sol.C_coeffs, heat.C_coeffs), (sol.f_coeffs, heat.f_coeffs)):
                    worst_heat = max(worst_heat, float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1.0))))
    elapsed = time.perf_counter() - start
    report(
        2,
        "structural identities",
        {"u(0)=phi": worst0 <= 1e-12, "u(T)=psi": worstT <= 1e-8, "alpha=1 vs heat": worst_heat <= 1e-12},
        elapsed,
        10.0,
        f"sup|u(0)-phi| {worst0:.1e}, |u(T)-psi| {worstT:.1e}, heat-path diff {worst_heat:.1e}",
    )


def test_criterion_3_round_trip():
    start = time.perf_counter()
    errors = {}
    checks = {}
    for eps in (0.0, 0.9):
        sys = involution(eps)
        data = rod_data(sys)
        rep = verify_reconstruction(sys, data, solve(sys, data, 50), SpaceGrid(401), 4000)
        errors[f"eps={eps:g}"] = rep.terminal_error
        checks[f"heat eps={eps:g}"] = rep.terminal_error <= 5e-3
        frac = rod_data(sys, 0.5)
        rep = verify_reconstruction(sys, frac, solve(sys, frac, 50), SpaceGrid(401), 4000)
        errors[f"eps={eps:g},alpha=0.5"] = rep.terminal_error
        checks[f"L1 eps={eps:g}"] = rep.oracle == "l1" and rep.terminal_error <= 1e-2
    elapsed = time.perf_counter() - start
    detail = ", ".join(f"{k}: {v:.2e}" for k, v in errors.items())
    report(3, "inverse->forward round trip", checks, elapsed, 60.0, detail)


def test_criterion_4_energy(tmp_path):
    start = time.perf_counter()
    table = compare_energy(ExperimentConfig(truncations=(20,), epsilons=(0.0, 0.9), output_dir=tmp_path))
    rows = {r["epsilon"]: r for r in table["rows"]}
    i = table["snapshot_times"].index(2.5)
    f0, f9 = rows[0.0]["f_norm"], rows[0.9]["f_norm"]
    u0, u9 = rows[0.0]["free_norm"][i], rows[0.9]["free_norm"][i]
    elapsed = time.perf_counter() - start
    report(
        4,
        "involution needs more cooling energy",
        {"|f| ordering": f9 > f0, "free cooling at t=2.5": u9 > u0},
        elapsed,
        10.0,
        f"|f| {f0:.4g} (eps=0) < {f9:.4g} (eps=0.9); |u(2.5)| {u0:.4g} < {u9:.4g}",
    )


def test_criterion_5_truncation_convergence():
    start = time.perf_counter()
    checks = {}
    parts = []
    for eps in (0.9, 0.0):
        sys = involution(eps)
        data = rod_data(sys)
        lphi = rod_lphi(sys.nodes, eps)
        ref = evaluate_f(solve(sys, data, 40), lphi)
        d = [l2_norm(sys, evaluate_f(solve(sys, data, l), lphi) - ref) for l in (7, 10, 20)]
        checks[f"monotone eps={eps:g}"] = d[0] > d[1] > d[2]
        parts.append(f"eps={eps:g}: " + " > ".join(f"{v:.2e}" for v in d))
    elapsed = time.perf_counter() - start
    report(5, "truncation convergence", checks, elapsed, 5.0, "; ".join(parts))


def test_criterion_6_oracle_orders():
    start = time.perf_counter()
    errs = []
    for n1, M in [(32, 32), (64, 64), (128, 128)]:
        g = SpaceGrid(n1 - 1)
        u = forward_fd_heat(0.0, np.sin, 0.0, 1.0, g, M)
        errs.append(g.l2_norm(u - math.exp(-1.0) * np.sin(g.nodes)))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    checks = {"CN ratio": all(3.6 <= r <= 4.4 for r in ratios)}
    rates = {}
    g = SpaceGrid(31)
    lam = 4.0 / g.h**2 * math.sin(g.h / 2) ** 2  # sin(x_j) is a grid eigenvector
    for alpha in (0.3, 0.5, 0.7):
        exact = ml_neg(alpha, lam) * np.sin(g.nodes)
        e = [
            g.l2_norm(forward_l1_subdiffusion(0.0, np.sin, 0.0, alpha, 1.0, g, M) - exact)
            for M in (800, 1600)
        ]
        rates[alpha] = math.log2(e[0] / e[1])
        checks[f"L1 alpha={alpha}"] = abs(rates[alpha] - (2 - alpha)) <= 0.2 * (2 - alpha)
    elapsed = time.perf_counter() - start
    detail = "CN ratios " + ", ".join(f"{r:.3f}" for r in ratios) + "; L1 rates " + ", ".join(
        f"{a}: {r:.2f} (2-a={2 - a:.1f})" for a, r in rates.items()
    )
    report(6, "oracle convergence orders", checks, elapsed, 30.0, detail)


def test_criterion_7_uniqueness_linearity():
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    checks = {}
    worst_lin = 0.0
    worst_stat = 0.0
    for sys in (dirichlet_laplacian(), involution(0.9), harmonic_oscillator_1d()):
        z = np.zeros(sys.nodes.size)
        for alpha in (1.0, 0.5):
            sol = solve(sys, ProblemData(z, z, 2.0, alpha), 30)
            zero = not (np.any(evaluate_f(sol)) or np.any(evaluate_u(sol, 1.0)) or np.any(sol.C_coeffs))
            checks[f"zero {sys.name} alpha={alpha}"] = zero
            p1, q1, p2, q2 = (synthesize(sys, rng.normal(size=25)) for _ in range(4))
            a, b = rng.normal(size=2)
            s1 = solve(sys, ProblemData(p1, q1, 2.0, alpha), 30)
            s2 = solve(sys, ProblemData(p2, q2, 2.0, alpha), 30)
            s = solve(sys, ProblemData(a * p1 + b * p2, a * q1 + b * q2, 2.0, alpha), 30)
            for name in ("C_coeffs", "f_coeffs"):
                combo = a * getattr(s1, name) + b * getattr(s2, name)
                rel = np.max(np.abs(getattr(s, name) - combo)) / max(np.max(np.abs(combo)), 1.0)
                worst_lin = max(worst_lin, float(rel))
            phi = synthesize(sys, rng.normal(size=25))
            st = solve(sys, ProblemData(phi, phi, 2.0, alpha), 30)
            lphi = apply_operator(sys, phi, 30)
            worst_stat = max(
                worst_stat,
                l2_norm(sys, evaluate_f(st) - lphi) / l2_norm(sys, lphi),
                max(l2_norm(sys, evaluate_u(st, t) - phi) for t in (0.3, 1.0, 2.0)),
            )
    checks["linearity 1e-10"] = worst_lin <= 1e-10
    checks["phi=psi stationary"] = worst_stat <= 1e-12
    elapsed = time.perf_counter() - start
    report(
        7,
        "uniqueness and linearity",
        checks,
        elapsed,
        5.0,
        f"linearity rel err {worst_lin:.1e}, stationary residual {worst_stat:.1e}",
    )
