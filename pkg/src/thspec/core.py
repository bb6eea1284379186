"""Domain types, constants, unit conversion and the molecule registry.

All computation downstream runs in natural units (hbar = c = 1) with a single
length unit per run: fm for the nuclear-style presets, Angstrom for molecules.
Energies and masses therefore carry inverse-length dimension.
"""
from __future__ import annotations

import csv
import enum
import math
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import PoleInDomain

REGISTRY_ENV = "THSPEC_REGISTRY"
REGISTRY_HEADER = ["name", "c_h", "mu_amu", "b_h_inv_angstrom", "r_e_angstrom", "D_wavenumber"]


class Branch(str, enum.Enum):
    SPIN = "spin"
    PSPIN = "pspin"


@dataclass(frozen=True)
class ThPotential:
    """Tietz-Hua potential D [(1 - e^{-b_h(r-r_e)}) / (1 - c_h e^{-b_h(r-r_e)})]^2."""

    D: float
    b_h: float
    r_e: float
    c_h: float

    def __post_init__(self):
        if not self.D >= 0:
            raise ValueError(f"D must be >= 0, got {self.D}")
        if not self.b_h > 0:
            raise ValueError(f"b_h must be > 0, got {self.b_h}")
        if not self.r_e > 0:
            raise ValueError(f"r_e must be > 0, got {self.r_e}")
        if not self.c_h < 1:
            raise ValueError(f"c_h must be < 1, got {self.c_h}")
        # 1 - c_h e^{-b_h(r - r_e)} has a zero on r > 0 iff c_h > e^{-alpha};
        # equality puts the pole exactly at r = 0 (generalized Morse case).
        if self.c_h > 0 and self.c_h > math.exp(-self.alpha):
            raise PoleInDomain(
                f"c_h = {self.c_h} exceeds e^(-alpha) = {math.exp(-self.alpha):.6g}"
            )

    @property
    def alpha(self):
        return self.b_h * self.r_e

    @property
    def morse_beta(self):
        return self.b_h / (1.0 - self.c_h)

    def __call__(self, r):
        return th_potential_value(self, r)


@dataclass(frozen=True)
class SymmetryConfig:
    """Exact-symmetry limit: branch, fermion mass M and the constant C (C_s or C_ps)."""

    branch: Branch
    M: float
    C: float

    def __post_init__(self):
        object.__setattr__(self, "branch", Branch(self.branch))
        if not self.M > 0:
            raise ValueError(f"M must be > 0, got {self.M}")

    def eta(self, kappa):
        return kappa * (kappa + 1) if self.branch is Branch.SPIN else kappa * (kappa - 1)

    def gamma(self, E):
        """gamma = M + E - C_s (spin) or E - M - C_ps (pspin)."""
        if self.branch is Branch.SPIN:
            return self.M + E - self.C
        return E - self.M - self.C

    def beta_sq(self, E):
        if self.branch is Branch.SPIN:
            return (self.M - E) * (self.M + E - self.C)
        return (self.M + E) * (self.M - E + self.C)

    def partner_denominator(self, E):
        """Prefactor denominator of the first-order partner relation."""
        if self.branch is Branch.SPIN:
            return self.M + E - self.C
        return self.M - E + self.C

    # Near-threshold work (heavy masses) loses everything to cancellation if
    # done in E. Writing E = threshold + t gives
    #   gamma = t + delta,   beta^2 = -t (t + delta)
    # exactly, for both branches.

    @property
    def threshold(self):
        """Zero of beta^2 at which gamma = delta: M (spin) or -M (pspin)."""
        return self.M if self.branch is Branch.SPIN else -self.M

    @property
    def delta(self):
        if self.branch is Branch.SPIN:
            return 2.0 * self.M - self.C
        return -(2.0 * self.M + self.C)

    def gamma_rel(self, t):
        return t + self.delta

    def beta_sq_rel(self, t):
        return -t * (t + self.delta)

    def partner_denominator_rel(self, t):
        g = self.gamma_rel(t)
        return g if self.branch is Branch.SPIN else -g

    def gamma_poly(self):
        """gamma(E) as numpy poly1d coefficients (highest power first)."""
        if self.branch is Branch.SPIN:
            return np.poly1d([1.0, self.M - self.C])
        return np.poly1d([1.0, -self.M - self.C])

    def beta_sq_poly(self):
        if self.branch is Branch.SPIN:
            return np.poly1d([-1.0, self.M]) * np.poly1d([1.0, self.M - self.C])
        return np.poly1d([1.0, self.M]) * np.poly1d([-1.0, self.M + self.C])

    def gamma_rel_poly(self):
        return np.poly1d([1.0, self.delta])

    def beta_sq_rel_poly(self):
        return -np.poly1d([1.0, 0.0]) * np.poly1d([1.0, self.delta])


_L_LETTERS = "spdfghiklmnoqrtuvwxyz"


@dataclass(frozen=True)
class QuantumState:
    n: int
    kappa: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"n must be a non-negative integer, got {self.n}")
        if int(self.kappa) != self.kappa or self.kappa == 0:
            raise ValueError(f"kappa must be a nonzero integer, got {self.kappa}")

    def eta(self, branch):
        k = self.kappa
        return k * (k + 1) if Branch(branch) is Branch.SPIN else k * (k - 1)

    @property
    def l(self):
        return -self.kappa - 1 if self.kappa < 0 else self.kappa

    @property
    def two_j(self):
        return 2 * abs(self.kappa) - 1

    def label(self, branch=Branch.SPIN):
        """Spectroscopic label, e.g. '0p_{3/2}'.

        Pseudospin doublet partners with kappa > 0 carry radial index n - 1,
        which is how (1s_{1/2}, 0d_{3/2}) pairs are written.
        """
        n = self.n
        if Branch(branch) is Branch.PSPIN and self.kappa > 0 and n > 0:
            n -= 1
        return f"{n}{_L_LETTERS[self.l]}_{{{self.two_j}/2}}"


@dataclass(frozen=True)
class PhysicalConstants:
    hbar_c: float = 1973.29  # eV * Angstrom
    amu: float = 931.494028e6  # eV / c^2
    wavenumber_convention: str = "2pi"

    def __post_init__(self):
        if self.wavenumber_convention not in ("2pi", "plain"):
            raise ValueError("wavenumber_convention must be '2pi' or 'plain'")

    @property
    def wavenumber_to_energy(self):
        """eV per cm^-1: 2*pi*hbar*c (or hbar*c for 'plain'), hbar*c taken in eV*cm."""
        hc_ev_cm = self.hbar_c * 1e-8
        return 2.0 * math.pi * hc_ev_cm if self.wavenumber_convention == "2pi" else hc_ev_cm


@dataclass(frozen=True)
class MoleculeRecord:
    name: str
    c_h: float
    mu: float  # amu
    b_h: float  # 1/Angstrom
    r_e: float  # Angstrom
    D: float  # cm^-1


def th_potential_value(pot, r):
    r = np.asarray(r, dtype=float)
    u = np.exp(-pot.b_h * (r - pot.r_e))
    den = 1.0 - pot.c_h * u
    if np.any(den == 0.0):
        raise PoleInDomain("Tietz-Hua denominator vanishes")
    out = pot.D * ((1.0 - u) / den) ** 2
    return out if out.ndim else float(out)


def to_natural_units(rec, consts=PhysicalConstants()):
    """Convert a registry row to (ThPotential in 1/Angstrom, M in 1/Angstrom)."""
    D = rec.D * consts.wavenumber_to_energy / consts.hbar_c
    pot = ThPotential(D=D, b_h=rec.b_h, r_e=rec.r_e, c_h=rec.c_h)
    M = rec.mu * consts.amu / consts.hbar_c
    return pot, M


def from_natural_units(name, pot, M, consts=PhysicalConstants()):
    return MoleculeRecord(
        name=name,
        c_h=pot.c_h,
        mu=M * consts.hbar_c / consts.amu,
        b_h=pot.b_h,
        r_e=pot.r_e,
        D=pot.D * consts.hbar_c / consts.wavenumber_to_energy,
    )


def _registry_text(path):
    if path is None:
        path = os.environ.get(REGISTRY_ENV)
    if path:
        return Path(path).read_text(encoding="utf-8")
    return resources.files("thspec").joinpath("data/molecules.csv").read_text(encoding="utf-8")


def load_registry(path=None):
    """Return {name: MoleculeRecord}; THSPEC_REGISTRY overrides the bundled CSV."""
    rows = csv.DictReader(_registry_text(path).splitlines())
    if rows.fieldnames != REGISTRY_HEADER:
        raise ValueError(f"registry header must be {','.join(REGISTRY_HEADER)}")
    out = {}
    for row in rows:
        out[row["name"]] = MoleculeRecord(
            name=row["name"],
            c_h=float(row["c_h"]),
            mu=float(row["mu_amu"]),
            b_h=float(row["b_h_inv_angstrom"]),
            r_e=float(row["r_e_angstrom"]),
            D=float(row["D_wavenumber"]),
        )
    return out
