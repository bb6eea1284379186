"""Command-line interface: thspec {spectrum,table,sweep,wavefunction,verify,molecules}."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .core import Branch, SymmetryConfig, load_registry
from .errors import InvalidExponent, NoRoot, ThSpecError
from .oracle import CentrifugalMode, FdGrid, solve_self_consistent
from .spectra import Convention, solve_levels, solve_morse_levels
from .tables import (
    DEFAULT_CS_MODE,
    DEFAULT_MOLECULE_CONVENTION,
    DEFAULT_WAVENUMBER,
    PRESETS,
    calibration_study,
    fm_table,
    molecule_setup,
    molecule_table,
    preset,
)
from .wavefunctions import build_spinor, partner_component, primary_component, solution_grid

EXIT_OK, EXIT_USAGE, EXIT_NO_STATE, EXIT_VERIFY = 0, 2, 3, 4
VERIFY_TOL = 1e-4


class UsageError(Exception):
    pass


class MissingState(Exception):
    pass


# -- output ------------------------------------------------------------------


def _fmt_csv(v):
    if isinstance(v, float) or isinstance(v, np.floating):
        return "" if not math.isfinite(v) else f"{float(v):.12g}"
    return "" if v is None else str(v)


def _fmt_text(v, units):
    if isinstance(v, float) or isinstance(v, np.floating):
        if not math.isfinite(v):
            return "-"
        return f"{float(v):.7f}" if units == "fm" else f"{float(v):.9g}"
    return "" if v is None else str(v)


def _json_safe(v):
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(rows, fmt, units, params, notes=()):
    if fmt == "json":
        doc = {
            "meta": {"version": __version__, "params": {k: _json_safe(v) for k, v in params.items()}},
            "rows": [{k: _json_safe(v) for k, v in r.items()} for r in rows],
        }
        if notes:
            doc["meta"]["notes"] = list(notes)
        return json.dumps(doc, indent=2) + "\n"
    cols = list(rows[0].keys()) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt_csv(r[c]) for c in cols])
        return buf.getvalue()
    cells = [cols] + [[_fmt_text(r[c], units) for c in cols] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
    lines = ["  ".join(x.rjust(w) for x, w in zip(row, widths)) for row in cells]
    lines += [f"# {n}" for n in notes]
    return "\n".join(lines) + "\n"


def emit(args, rows, params, notes=()):
    text = render(rows, args.format, args.units, params, notes)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if notes and args.format == "csv":
        for n in notes:
            print(f"# {n}", file=sys.stderr)


# -- problem setup -----------------------------------------------------------


def _int_list(text):
    try:
        return [int(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _add_problem_args(p, symmetries=("spin", "pspin")):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--molecule")
    p.add_argument("--symmetry", choices=list(symmetries))
    p.add_argument("--ch", type=float, help="override c_h")
    p.add_argument("--bh", type=float, help="override b_h")
    p.add_argument("--re", type=float, help="override r_e")
    p.add_argument("--D", type=float, help="override well depth")
    p.add_argument("--M", type=float, help="override fermion mass")
    p.add_argument("--C", type=float, help="override C_s / C_ps")
    p.add_argument("--convention", choices=[c.value for c in Convention])
    p.add_argument("--cs-mode", choices=["constant", "equal-mass", "zero-with-binding"], default=DEFAULT_CS_MODE)
    p.add_argument("--wavenumber-convention", choices=["2pi", "plain"], default=DEFAULT_WAVENUMBER)


class Problem:
    """Resolved solver inputs plus the unit conversion for reporting."""

    def __init__(self, sym, pot, convention, units, to_out=lambda E: E, params=None, level_out=None):
        self.sym, self.pot, self.convention, self.units = sym, pot, convention, units
        self.to_out = to_out
        self.level_out = level_out or (lambda lv: to_out(lv.E))
        self.params = params or {}


def resolve_problem(args, default_convention=Convention.TABULATED):
    overrides = {k: getattr(args, a) for k, a in (("D", "D"), ("b_h", "bh"), ("r_e", "re"), ("c_h", "ch"))
                 if getattr(args, a, None) is not None}
    if getattr(args, "molecule", None):
        registry = load_registry()
        if args.molecule not in registry:
            raise UsageError(f"unknown molecule {args.molecule!r}; known: {', '.join(registry)}")
        branch = Branch(args.symmetry or "spin")
        setup = molecule_setup(registry[args.molecule], branch, args.cs_mode, args.wavenumber_convention)
        pot = replace(setup.pot, **overrides) if overrides else setup.pot
        sym = setup.sym
        if args.M is not None or args.C is not None:
            sym = SymmetryConfig(branch, args.M if args.M is not None else sym.M,
                                 args.C if args.C is not None else sym.C)
        conv = Convention(args.convention or DEFAULT_MOLECULE_CONVENTION)
        units = args.units or "eVA"
        to_out = setup.to_ev if units == "eVA" else (lambda E: E)
        level_out = setup.level_to_ev if units == "eVA" else None
        params = dict(molecule=args.molecule, cs_mode=args.cs_mode,
                      wavenumber_convention=args.wavenumber_convention)
    else:
        name = args.preset or ("table3" if args.symmetry == "pspin" else "table2")
        sym, pot = preset(name)
        if args.symmetry and Branch(args.symmetry) is not sym.branch:
            sym = SymmetryConfig(args.symmetry, sym.M, -sym.C)
        pot = replace(pot, **overrides) if overrides else pot
        if args.M is not None or args.C is not None:
            sym = SymmetryConfig(sym.branch, args.M if args.M is not None else sym.M,
                                 args.C if args.C is not None else sym.C)
        conv = Convention(args.convention or default_convention)
        units = args.units or "fm"
        to_out = lambda E: E  # noqa: E731
        level_out = None
        params = dict(preset=name)
    params.update(symmetry=sym.branch.value, M=sym.M, C=sym.C, D=pot.D, b_h=pot.b_h, r_e=pot.r_e,
                  c_h=pot.c_h, convention=conv.value, units=units)
    return Problem(sym, pot, conv, units, to_out, params, level_out)


def _levels(prob, n, kappa, morse_version=None):
    if morse_version:
        return solve_morse_levels(prob.sym, prob.pot, n, kappa, morse_version, prob.convention)
    return solve_levels(prob.sym, prob.pot, n, kappa, prob.convention)


# -- subcommands -------------------------------------------------------------


def cmd_spectrum(args):
    prob = resolve_problem(args)
    args.units = prob.units
    rows = []
    for n in args.n:
        for k in args.kappa:
            if k == 0:
                raise UsageError("kappa must be nonzero")
            levels = _levels(prob, n, k, args.morse_version)
            if not levels:
                raise MissingState(f"no bound state for n={n}, kappa={k}")
            for lv in levels:
                rows.append({
                    "n": n, "kappa": k, "label": lv.label, "E": float(prob.level_out(lv)),
                    "residual": lv.residual, "bracket_lo": float(prob.to_out(lv.bracket[0])),
                    "bracket_hi": float(prob.to_out(lv.bracket[1])),
                })
    emit(args, rows, prob.params)
    return EXIT_OK


def cmd_table(args):
    which = args.which
    if which in (2, 3):
        args.units = args.units or "fm"
        conv = Convention(args.convention or Convention.TABULATED)
        rows = fm_table(which, conv)
        emit(args, rows, {"table": which, "convention": conv.value})
        return EXIT_OK
    args.units = args.units or "eVA"
    conv = Convention(args.convention or DEFAULT_MOLECULE_CONVENTION)
    rows = molecule_table(which, args.cs_mode, args.wavenumber_convention, conv)
    study = calibration_study(which)
    best = study[0]
    notes = [
        f"discrepancy report: best flag combination matches {best.matched}/{best.total} entries "
        f"to 3 significant figures (cs-mode={best.cs_mode}, wavenumber={best.wavenumber_convention}, "
        f"convention={best.convention.value})",
    ] + [
        f"  cs-mode={c.cs_mode} wavenumber={c.wavenumber_convention} convention={c.convention.value}: "
        f"{c.matched}/{c.total} matched, max rel dev {c.max_rel_dev:.3g}"
        for c in study
    ]
    params = {"table": which, "cs_mode": args.cs_mode, "wavenumber_convention": args.wavenumber_convention,
              "convention": conv.value}
    emit(args, rows, params, notes)
    return EXIT_OK


_SWEEP_FIELDS = {"bh": "b_h", "ch": "c_h", "re": "r_e"}


def cmd_sweep(args):
    if not args.lo < args.hi:
        raise UsageError("sweep needs lo < hi")
    if args.steps < 2:
        raise UsageError("sweep needs steps >= 2")
    args.units = args.units or "fm"
    branches = ["spin", "pspin"] if args.symmetry in (None, "both") else [args.symmetry]
    states = [tuple(_int_list(s)) for s in args.states.split(";")]
    rows = []
    for br in branches:
        ns = argparse.Namespace(**{**vars(args), "symmetry": br, "preset": None, "molecule": None})
        prob = resolve_problem(ns)
        for value in np.linspace(args.lo, args.hi, args.steps):
            field = _SWEEP_FIELDS[args.param]
            reason = ""
            try:
                pot = replace(prob.pot, **{field: float(value)})
            except (ThSpecError, ValueError) as exc:
                pot, reason = None, f"invalid-potential: {exc}"
            for n, k in states:
                E = math.nan
                if pot is not None:
                    levels = solve_levels(prob.sym, pot, n, k, prob.convention)
                    if levels:
                        E = levels[0].E
                    else:
                        reason = "no-bound-state"
                rows.append({"param": args.param, "value": float(value), "symmetry": br, "n": n,
                             "kappa": k, "E": E, "reason": reason if not math.isfinite(E) else ""})
    emit(args, rows, {"param": args.param, "lo": args.lo, "hi": args.hi, "steps": args.steps})
    return EXIT_OK


def cmd_wavefunction(args):
    prob = resolve_problem(args, default_convention=Convention.PHYSICAL)
    args.units = prob.units
    levels = solve_levels(prob.sym, prob.pot, args.n[0], args.kappa[0], prob.convention)
    if not levels:
        raise MissingState(f"no bound state for n={args.n[0]}, kappa={args.kappa[0]}")
    try:
        sol = build_spinor(levels[0], prob.sym, prob.pot)
    except InvalidExponent as exc:
        raise MissingState(f"level E={levels[0].E:.9g} is not normalizable ({exc}); "
                           "use --convention physical") from exc
    r = solution_grid(sol, args.points)
    p, q = primary_component(sol, r), partner_component(sol, r)
    F, G = (p, q) if prob.sym.branch is Branch.SPIN else (q, p)
    rows = [{"r": float(a), "F": float(f), "G": float(g), "density": float(f * f + g * g)}
            for a, f, g in zip(r, F, G)]
    params = dict(prob.params, n=args.n[0], kappa=args.kappa[0], E=levels[0].E)
    emit(args, rows, params)
    return EXIT_OK


def cmd_verify(args):
    if not args.preset:
        raise UsageError("verify needs --preset table2|table3")
    from .tables import TABLE2, TABLE3

    args.units = args.units or "fm"
    sym, pot = preset(args.preset)
    golden = TABLE2 if args.preset == "table2" else TABLE3
    grid = FdGrid.for_potential(pot, N=args.grid_n)
    rows, worst, failed = [], 0.0, False
    for n, k, *_ in golden:
        levels = solve_levels(sym, pot, n, k, Convention.PHYSICAL)
        E_nu = levels[0].E if levels else math.nan
        try:
            E_fd = solve_self_consistent(sym, pot, n, k, CentrifugalMode.PEKERIS, grid).E
        except NoRoot:
            E_fd = math.nan
        try:
            E_ex = solve_self_consistent(sym, pot, n, k, CentrifugalMode.EXACT, grid).E
        except NoRoot:
            E_ex = math.nan
        if math.isfinite(E_nu) and math.isfinite(E_fd):
            dev = abs(E_fd - E_nu) / abs(E_nu)
            status = "ok" if dev <= VERIFY_TOL else "FAIL"
        elif not math.isfinite(E_nu) and not math.isfinite(E_fd):
            dev, status = math.nan, "absent-in-both"
        else:
            dev, status = math.inf, "FAIL"
        if not math.isnan(dev):
            worst = max(worst, dev)
        failed |= status == "FAIL"
        rows.append({"n": n, "kappa": k, "E_nu": E_nu, "E_fd_pekeris": E_fd, "rel_dev": dev,
                     "E_fd_exact": E_ex, "pekeris_error": E_ex - E_fd, "status": status})
    emit(args, rows, {"preset": args.preset, "grid_n": args.grid_n, "tolerance": VERIFY_TOL},
         [f"max relative deviation (Pekeris mode): {worst:.3g}",
          f"states with no bound state in either solver: {sum(r['status'] == 'absent-in-both' for r in rows)}"])
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_molecules(args):
    args.units = args.units or "eVA"
    rows = [{"name": m.name, "c_h": m.c_h, "mu_amu": m.mu, "b_h": m.b_h, "r_e": m.r_e, "D_wavenumber": m.D}
            for m in load_registry().values()]
    emit(args, rows, {})
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json", "text"], default="text")
    common.add_argument("--units", choices=["fm", "eVA"])
    common.add_argument("--out", help="write output to this path")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="thspec", description=__doc__)
    parser.add_argument("--version", action="version", version=f"thspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="energies for chosen (n, kappa)")
    _add_problem_args(p)
    p.add_argument("--n", type=_int_list, default=[0])
    p.add_argument("--kappa", type=_int_list, default=[-2])
    p.add_argument("--morse-version", type=int, choices=[1, 2])
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("table", parents=[common], help="regenerate a published table")
    p.add_argument("which", type=int, choices=[2, 3, 5, 6])
    p.add_argument("--convention", choices=[c.value for c in Convention])
    p.add_argument("--cs-mode", choices=["constant", "equal-mass", "zero-with-binding"], default=DEFAULT_CS_MODE)
    p.add_argument("--wavenumber-convention", choices=["2pi", "plain"], default=DEFAULT_WAVENUMBER)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("sweep", parents=[common], help="E as a function of one potential parameter")
    _add_problem_args(p, ("spin", "pspin", "both"))
    p.add_argument("--param", choices=sorted(_SWEEP_FIELDS), required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--steps", type=int, default=21)
    p.add_argument("--states", default="0,-2", help="semicolon-separated n,kappa pairs")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("wavefunction", parents=[common], help="sample a normalized spinor")
    _add_problem_args(p)
    p.add_argument("--n", type=_int_list, default=[0])
    p.add_argument("--kappa", type=_int_list, default=[-2])
    p.add_argument("--points", type=int, default=400)
    p.set_defaults(func=cmd_wavefunction)

    p = sub.add_parser("verify", parents=[common], help="finite-difference cross-check")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--grid-n", type=int, default=6000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("molecules", parents=[common], help="list the molecule registry")
    p.set_defaults(func=cmd_molecules)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"thspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MissingState as exc:
        print(f"thspec: {exc}", file=sys.stderr)
        return EXIT_NO_STATE
    except (ThSpecError, ValueError) as exc:
        print(f"thspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
