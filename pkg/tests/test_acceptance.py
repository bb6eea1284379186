"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (printed in the pytest terminal summary,
or directly when this file is run as a script) and then asserts.
"""
import math
import random
import subprocess
import sys
import time
from dataclasses import replace

import numpy as np
import pytest
import sympy as sp

from conftest import record
from thspec import nu
from thspec.core import SymmetryConfig, ThPotential
from thspec.errors import NoRoot, ThSpecError
from thspec.oracle import CentrifugalMode, FdGrid, solve_self_consistent
from thspec.pekeris import coefficients_from
from thspec.spectra import build_nu_input, solve_levels, solve_morse_levels, solve_nonrel
from thspec.tables import FM_COLUMNS, TABLE2, TABLE3, calibration_study, fm_table, preset
from thspec.wavefunctions import (
    build_spinor,
    density_integral,
    node_count,
    partner_component,
    primary_component,
    primary_derivative,
)

FM_TOL = 5e-6


def _table_check(which):
    t0 = time.perf_counter()
    rows = fm_table(which)
    elapsed = time.perf_counter() - t0
    worst = {c: max(abs(r[f"{c}_delta_vs_ref"]) for r in rows) for c in FM_COLUMNS}
    return rows, worst, elapsed


def test_criterion_01_table2():
    rows, worst, elapsed = _table_check(2)
    ok = all(w <= FM_TOL for w in worst.values()) and elapsed < 5.0
    record(1, ok, f"Table 2 max |delta| per column {', '.join(f'{c}={w:.2e}' for c, w in worst.items())}, "
                  f"{elapsed:.2f}s")
    assert ok


def test_criterion_02_table3():
    rows, worst, elapsed = _table_check(3)
    negative = all(r[c] < 0 for r in rows for c in FM_COLUMNS)
    ok = all(w <= FM_TOL for w in worst.values()) and negative and elapsed < 5.0
    record(2, ok, f"Table 3 max |delta| per column {', '.join(f'{c}={w:.2e}' for c, w in worst.items())}, "
                  f"all negative={negative}, {elapsed:.2f}s")
    assert ok


def test_criterion_03_doublets():
    worst = 0.0
    for name, golden in (("table2", TABLE2), ("table3", TABLE3)):
        sym, pot = preset(name)
        for n, k, kp, *_ in golden:
            a = solve_levels(sym, pot, n, k)[0].E
            b = solve_levels(sym, pot, n, kp)[0].E
            worst = max(worst, abs(a - b))
    ok = worst <= 1e-10
    record(3, ok, f"max |E(kappa) - E(partner)| = {worst:.1e} over 16 pairs")
    assert ok


def test_criterion_04_oracle():
    t0 = time.perf_counter()
    worst_dev, worst_stab, missing = 0.0, 0.0, []
    for name, golden in (("table2", TABLE2), ("table3", TABLE3)):
        sym, pot = preset(name)
        g1 = FdGrid.for_potential(pot, 3000)
        g2, g3 = g1.refined(), g1.refined().refined()
        for n, k, *_ in golden:
            levels = solve_levels(sym, pot, n, k, "physical")
            try:
                e1, e2, e3 = (solve_self_consistent(sym, pot, n, k, CentrifugalMode.PEKERIS, g,
                                                    richardson=False).E for g in (g1, g2, g3))
            except NoRoot:
                missing.append((name, n, k))
                continue
            if not levels:
                missing.append((name, n, k))
                continue
            r12, r23 = (4 * e2 - e1) / 3, (4 * e3 - e2) / 3
            E = levels[0].E
            worst_dev = max(worst_dev, abs(r23 - E) / abs(E))
            worst_stab = max(worst_stab, abs(r23 - r12) / abs(r23))
    elapsed = time.perf_counter() - t0
    ok = not missing and worst_dev <= 1e-4 and worst_stab <= 1e-6 and elapsed < 60.0
    record(4, ok, f"{16 - len(missing)}/16 states have a bound state to compare; max rel dev {worst_dev:.1e}, "
                  f"Richardson stability {worst_stab:.1e}, {elapsed:.1f}s"
                  + (f"; no physical state for {len(missing)} (Table 3 parameters)" if missing else ""))
    assert ok


def test_criterion_05_pekeris_taylor():
    rng = random.Random(20261019)
    x = sp.symbols("x")
    worst = 0.0
    for _ in range(20):
        alpha = rng.uniform(1.0, 6.0)
        c = rng.uniform(-0.3, min(0.3, math.exp(-alpha)))
        D0, D1, D2 = coefficients_from(alpha, c).as_tuple()
        u = sp.exp(-sp.Float(alpha, 30) * x)
        y = u / (1 - sp.Float(c, 30) * u)
        f = D0 + D1 * y + D2 * y**2
        g = 1 / (1 + x) ** 2
        for k in range(3):
            a = float(sp.diff(f, x, k).subs(x, 0))
            b = float(sp.diff(g, x, k).subs(x, 0))
            worst = max(worst, abs(a - b) / abs(b))
    ok = worst <= 1e-8
    record(5, ok, f"max relative mismatch of value, 1st, 2nd derivative over 20 draws: {worst:.1e}")
    assert ok


def test_criterion_06_continuity():
    worst = 0.0
    for name, golden in (("table2", TABLE2), ("table3", TABLE3)):
        sym, pot = preset(name)
        for n, k, *_ in golden:
            m1 = solve_morse_levels(sym, pot, n, k, 1)[0].E
            for c in (1e-7, -1e-7):
                worst = max(worst, abs(solve_levels(sym, replace(pot, c_h=c), n, k)[0].E - m1))
    ok = worst <= 1e-5
    record(6, ok, f"max |E(c_h=+-1e-7) - E(Morse I)| = {worst:.1e} fm^-1")
    assert ok


def test_criterion_07_molecules():
    best = {w: calibration_study(w)[0] for w in (5, 6)}
    full = all(b.matched == b.total for b in best.values())
    report = ""
    if not full:
        proc = subprocess.run([sys.executable, "-m", "thspec.cli", "table", "6", "--format", "csv"],
                              capture_output=True, text=True)
        report_ok = proc.returncode == 0 and "discrepancy report" in proc.stderr
        report = f"; no combination reproduces the tables, discrepancy report emitted={report_ok}"
    ok = full or report_ok
    record(7, ok, "best combination: "
                  + ", ".join(f"Table {w} {b.matched}/{b.total} ({b.cs_mode}, {b.wavenumber_convention}, "
                              f"{b.convention.value})" for w, b in best.items()) + report)
    assert ok


def _sweep(sym, pot, field, values, n=0, k=-2):
    out = []
    for v in values:
        try:
            p = replace(pot, **{field: float(v)})
        except (ValueError, ThSpecError):
            out.append(math.nan)
            continue
        levels = solve_levels(sym, p, n, k)
        out.append(levels[0].E if levels else math.nan)
    return np.array(out)


def test_criterion_08_trends():
    sym, pot = preset("table2")
    psym, ppot = preset("table3")
    checks = {}
    for field in ("b_h", "r_e"):
        base = getattr(pot, field)
        vals = np.linspace(0.8 * base, 1.2 * base, 9)
        e_s = _sweep(sym, pot, field, vals)
        e_p = _sweep(psym, ppot, field, vals, 1, -1)
        checks[f"spin {field} decreasing"] = bool(np.all(np.diff(e_s) < 0))
        checks[f"pspin {field} increasing"] = bool(np.all(np.diff(e_p) > 0))
    e_c = _sweep(sym, pot, "c_h", np.linspace(-0.1, 0.1, 21))
    finite = e_c[np.isfinite(e_c)]
    spread = (finite.max() - finite.min()) / abs(np.median(finite))
    checks["c_h spread < 5%"] = bool(np.all(np.isfinite(e_c)) and spread < 0.05)
    ok = all(checks.values())
    detail = ", ".join(f"{k}={v}" for k, v in checks.items())
    record(8, ok, f"{detail}; c_h spread {spread:.1%}, {np.count_nonzero(~np.isfinite(e_c))} invalid c_h points")
    assert ok


def test_criterion_09_wavefunctions():
    spin = preset("table2")
    pspin = (SymmetryConfig("pspin", 10.0, -20.0), ThPotential(5.0, 0.988879, 2.40873, 0.01))
    nodes_ok, worst_norm, worst_der, worst_partner = True, 0.0, 0.0, 0.0
    r = np.linspace(0.6, 8.0, 30)
    h = 1e-3
    for sym, pot in (spin, pspin):
        for n, k in ((0, -2), (1, -1), (2, 3), (1, -4)):
            lv = solve_levels(sym, pot, n, k, "physical")[0]
            sol = build_spinor(lv, sym, pot)
            nodes_ok &= node_count(sol) == n
            worst_norm = max(worst_norm, abs(density_integral(sol) - 1.0))
            f = lambda x: primary_component(sol, x)  # noqa: E731
            num = (f(r - 2 * h) - 8 * f(r - h) + 8 * f(r + h) - f(r + 2 * h)) / (12 * h)
            ana = primary_derivative(sol, r)
            big = np.abs(ana) > 1e-3 * np.abs(ana).max()
            worst_der = max(worst_der, np.max(np.abs(ana - num)[big] / np.abs(ana)[big]))
            # spin: G = (F' + kappa F/r)/(M + E - C_s); pspin: F = (G' - kappa G/r)/(M - E + C_ps)
            E = lv.E
            den = sym.M + E - sym.C if sym.branch.value == "spin" else sym.M - E + sym.C
            sgn = 1 if sym.branch.value == "spin" else -1
            ref = (ana + sgn * k * f(r) / r) / den
            worst_partner = max(worst_partner,
                                np.max(np.abs(partner_component(sol, r) - ref)) / np.max(np.abs(ref)))
    ok = nodes_ok and worst_norm <= 1e-8 and worst_der <= 1e-7 and worst_partner <= 1e-8
    record(9, ok, f"nodes={nodes_ok}, norm err {worst_norm:.1e}, derivative rel err {worst_der:.1e}, "
                  f"partner rel err {worst_partner:.1e}")
    assert ok


def test_criterion_10_nu_engine():
    rng = np.random.default_rng(7)
    worst_b5 = 0.0
    for _ in range(200):
        c1, c2, c3, x1, x2, x3 = rng.uniform(-3, 3, 6)
        c4, c5 = (1 - c1) / 2, (c2 - 2 * c3) / 2
        c6, c7, c8 = c5**2 + x1, 2 * c4 * c5 - x2, c4**2 + x3
        c9 = nu._base_constants(c1, c2, c3, x1, x2, x3)[5]
        worst_b5 = max(worst_b5, abs(c9 - (c3 * (c7 + c3 * c8) + c6)) / max(1.0, abs(c9)))
    worst_jac = 0.0
    x = np.linspace(-1, 1, 41)
    for n in range(11):
        for a, b in ((0.5, 1.5), (3.2, 7.7), (12.0, 0.3)):
            p, q = nu.jacobi_eval(n, a, b, x), nu.jacobi_hypergeometric(n, a, b, x)
            worst_jac = max(worst_jac, np.max(np.abs(p - q) / np.maximum(1.0, np.abs(q))))
    tau_ok, count = True, 0
    setups = [preset("table2"), (SymmetryConfig("pspin", 10.0, -20.0), ThPotential(5.0, 0.988879, 2.40873, 0.01))]
    for sym, pot in setups:
        for n in range(3):
            for k in (-3, -2, -1, 1, 2, 3):
                for lv in solve_levels(sym, pot, n, k, "physical"):
                    prob = build_nu_input(sym, pot, lv.state, lv.E, "physical", check_window=False, t=lv.E_rel)
                    inter = nu.nu_intermediates(nu.derive_constants(prob), prob)
                    tau_ok &= inter.tau_prime < 0
                    count += 1
    ok = worst_b5 <= 1e-14 and worst_jac <= 1e-12 and tau_ok and count > 0
    record(10, ok, f"c9 identity {worst_b5:.1e}, Jacobi recurrence vs hypergeometric {worst_jac:.1e}, "
                   f"tau' < 0 on {count} physical states={tau_ok}")
    assert ok


def test_criterion_11_nonrel_limit():
    _, pot = preset("table2")
    ok, parts = True, []
    for n, k, name in ((0, -2, "0p"), (1, -4, "1f")):
        devs = []
        for j in range(1, 5):
            M = 10.0 * 10**j
            lv = solve_levels(SymmetryConfig("spin", M, 0.0), pot, n, k, "physical")[0]
            ref = solve_nonrel(M, pot, n, -k - 1)[0].E
            devs.append(abs(lv.E_rel - ref) / abs(ref))
        ok &= all(b < a for a, b in zip(devs, devs[1:]))
        parts.append(f"{name}: " + ", ".join(f"{d:.1e}" for d in devs))
    record(11, ok, "rel dev for k=1..4 " + "; ".join(parts))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
