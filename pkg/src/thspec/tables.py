"""Published spectra (embedded golden data), presets, and table regeneration."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .core import Branch, PhysicalConstants, SymmetryConfig, ThPotential, load_registry, to_natural_units
from .spectra import Convention, DEFAULT_CONVENTION, solve_levels, solve_morse_levels

# shared parameter set for the fm tables
PRESET_BASE = dict(D=5.0, b_h=0.988879, r_e=2.40873)
PRESETS = {
    "table2": dict(branch=Branch.SPIN, M=10.0, C=10.0, c_h=0.01),
    "table3": dict(branch=Branch.PSPIN, M=10.0, C=-10.0, c_h=-0.01),
}

# (n, kappa<0, kappa>0, label pair, Morse II, Morse I, TH)
TABLE2 = [
    (0, -2, 1, "0p_{3/2}, 0p_{1/2}", 0.0188481, 0.0158972, 0.0156445),
    (0, -3, 2, "0d_{5/2}, 0d_{3/2}", 0.0336562, 0.0289087, 0.0292850),
    (0, -4, 3, "0f_{7/2}, 0f_{5/2}", 0.0525273, 0.0454736, 0.0468568),
    (0, -5, 4, "0g_{9/2}, 0g_{7/2}", 0.0754350, 0.0655857, 0.0683657),
    (1, -2, 1, "1p_{3/2}, 1p_{1/2}", 0.0899995, 0.0721426, 0.0711732),
    (1, -3, 2, "1d_{5/2}, 1d_{3/2}", 0.1136725, 0.0933683, 0.0926634),
    (1, -4, 3, "1f_{7/2}, 1f_{5/2}", 0.1438031, 0.120011, 0.119939),
    (1, -5, 4, "1g_{9/2}, 1g_{7/2}", 0.1791425, 0.151061, 0.152013),
]

TABLE3 = [
    (1, -1, 2, "1s_{1/2}, 0d_{3/2}", -0.0064123, -0.0063644, -0.0078235),
    (1, -2, 3, "1p_{3/2}, 0f_{5/2}", -0.0155771, -0.0152135, -0.0192390),
    (1, -3, 4, "1d_{5/2}, 0g_{7/2}", -0.0243659, -0.0233169, -0.0308043),
    (1, -4, 5, "1f_{7/2}, 0h_{9/2}", -0.0305297, -0.0285678, -0.0403430),
    (2, -1, 2, "2s_{1/2}, 1d_{3/2}", -0.0070204, -0.0070051, -0.0085285),
    (2, -2, 3, "2p_{3/2}, 1f_{5/2}", -0.0190441, -0.0188890, -0.0232805),
    (2, -3, 4, "2d_{5/2}, 1g_{7/2}", -0.0337719, -0.0331986, -0.0415466),
    (2, -4, 5, "2f_{7/2}, 1h_{9/2}", -0.0492150, -0.0478538, -0.0611045),
]

# (n, kappa, label, H2 [eV], I2 [eV])
TABLE5 = [
    (1, -1, "1s_{1/2}", 4.496299243, 0.04301938173),
    (1, -2, "1p_{3/2}", 4.792825206, 0.04908477248),
    (1, -3, "1d_{5/2}", 5.265998324, 0.06198365883),
    (2, -1, "2s_{1/2}", 5.208297483, 0.1330310673),
    (2, -2, "2p_{3/2}", 5.393734566, 0.1391726596),
    (2, -3, "2d_{5/2}", 5.714484641, 0.1517415539),
]

TABLE6 = [
    (1, -1, "1s_{1/2}", -4.716308462, -0.04908477248),
    (1, -2, "1p_{3/2}", -5.219487600, -0.06198365885),
    (1, -3, "1d_{5/2}", -5.808371132, -0.0828077168),
    (2, -1, "2s_{1/2}", -5.377765079, -0.1391726596),
    (2, -2, "2p_{3/2}", -5.738903598, -0.1517415539),
    (2, -3, "2d_{5/2}", -6.198359366, -0.1712385573),
]

FM_COLUMNS = ("morse2", "morse1", "th")
CS_MODES = ("constant", "equal-mass", "zero-with-binding")
WAVENUMBER_CONVENTIONS = ("2pi", "plain")
# defaults picked by calibration_study(); see README for the outcome
DEFAULT_CS_MODE = "zero-with-binding"
DEFAULT_WAVENUMBER = "2pi"
DEFAULT_MOLECULE_CONVENTION = Convention.PHYSICAL


def preset(name, c_h=None):
    p = PRESETS[name]
    sym = SymmetryConfig(p["branch"], p["M"], p["C"])
    pot = ThPotential(c_h=p["c_h"] if c_h is None else c_h, **PRESET_BASE)
    return sym, pot


def first_energy(levels):
    return levels[0].E if levels else math.nan


def fm_table(which, convention=DEFAULT_CONVENTION):
    """Rows {n, kappa, kappa_partner, label, <col>, <col>_ref, <col>_delta_vs_ref} for Table 2 or 3."""
    which = int(which)
    golden = TABLE2 if which == 2 else TABLE3
    sym, pot = preset(f"table{which}")
    rows = []
    for n, k, kp, label, m2, m1, th in golden:
        vals = {
            "morse2": first_energy(solve_morse_levels(sym, pot, n, k, 2, convention)),
            "morse1": first_energy(solve_morse_levels(sym, pot, n, k, 1, convention)),
            "th": first_energy(solve_levels(sym, pot, n, k, convention)),
        }
        row = {"n": n, "kappa": k, "kappa_partner": kp, "label": label}
        for col, ref in zip(FM_COLUMNS, (m2, m1, th)):
            row[col] = vals[col]
            row[f"{col}_ref"] = ref
            row[f"{col}_delta_vs_ref"] = vals[col] - ref
        rows.append(row)
    return rows


@dataclass(frozen=True)
class MoleculeSetup:
    sym: SymmetryConfig
    pot: ThPotential
    shift: float  # subtracted from E before reporting
    consts: PhysicalConstants

    def to_ev(self, E):
        return (E - self.shift) * self.consts.hbar_c

    def level_to_ev(self, level):
        """Like to_ev, but keeps the precision of levels near the threshold."""
        return ((level.E_ref - self.shift) + level.E_rel) * self.consts.hbar_c


def molecule_setup(record, branch, cs_mode=DEFAULT_CS_MODE, wavenumber_convention=DEFAULT_WAVENUMBER):
    """Translate a registry row and a reading of 'C = +-mu' into solver inputs.

    constant           M = mu, C = +-(mu in amu, used as a bare number)
    equal-mass         M = mu, C = +-mu
    zero-with-binding  M = mu, C = 0, report E -+ M
    """
    consts = PhysicalConstants(wavenumber_convention=wavenumber_convention)
    pot, M = to_natural_units(record, consts)
    branch = Branch(branch)
    sgn = 1.0 if branch is Branch.SPIN else -1.0
    if cs_mode == "constant":
        return MoleculeSetup(SymmetryConfig(branch, M, sgn * record.mu), pot, 0.0, consts)
    if cs_mode == "equal-mass":
        return MoleculeSetup(SymmetryConfig(branch, M, sgn * M), pot, 0.0, consts)
    if cs_mode == "zero-with-binding":
        return MoleculeSetup(SymmetryConfig(branch, M, 0.0), pot, sgn * M, consts)
    raise ValueError(f"unknown cs mode {cs_mode!r}")


def molecule_energy_ev(setup, n, kappa, convention):
    levels = solve_levels(setup.sym, setup.pot, n, kappa, convention)
    return setup.level_to_ev(levels[0]) if levels else math.nan


def molecule_table(which, cs_mode=DEFAULT_CS_MODE, wavenumber_convention=DEFAULT_WAVENUMBER,
                   convention=DEFAULT_MOLECULE_CONVENTION, registry=None):
    which = int(which)
    golden = TABLE5 if which == 5 else TABLE6
    branch = Branch.SPIN if which == 5 else Branch.PSPIN
    registry = registry or load_registry()
    setups = {name: molecule_setup(registry[name], branch, cs_mode, wavenumber_convention)
              for name in ("H2", "I2")}
    rows = []
    for n, k, label, h2, i2 in golden:
        row = {"n": n, "kappa": k, "label": label}
        for name, ref in (("H2", h2), ("I2", i2)):
            val = molecule_energy_ev(setups[name], n, k, convention)
            row[name] = val
            row[f"{name}_ref"] = ref
            row[f"{name}_delta_vs_ref"] = val - ref
        rows.append(row)
    return rows


def sig3_match(value, ref):
    """Agreement to 3 significant figures."""
    if not math.isfinite(value):
        return False
    return abs(value - ref) <= 0.5 * 10 ** (math.floor(math.log10(abs(ref))) - 2)


@dataclass(frozen=True)
class CalibrationResult:
    cs_mode: str
    wavenumber_convention: str
    convention: Convention
    matched: int
    total: int
    max_rel_dev: float


def calibration_study(which, registry=None):
    """Score every flag combination against Table 5 or 6, best first."""
    registry = registry or load_registry()
    out = []
    for cs, wc, conv in itertools.product(CS_MODES, WAVENUMBER_CONVENTIONS, list(Convention)):
        rows = molecule_table(which, cs, wc, conv, registry)
        pairs = [(r[m], r[f"{m}_ref"]) for r in rows for m in ("H2", "I2")]
        matched = sum(sig3_match(v, p) for v, p in pairs)
        devs = [abs(v - p) / abs(p) if math.isfinite(v) else math.inf for v, p in pairs]
        out.append(CalibrationResult(cs, wc, conv, matched, len(pairs), max(devs)))
    out.sort(key=lambda c: (-c.matched, c.max_rel_dev))
    return out
