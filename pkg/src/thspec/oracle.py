"""Finite-difference check of the analytic spectrum.

The effective radial equation depends on E through gamma(E), so we look for
E with  mu_n(E) + beta^2(E) = 0,  where mu_n(E) is the n-th Dirichlet
eigenvalue of  -d^2/dr^2 + eta W(r) + gamma(E) V(r).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import bisect

from .errors import GridTooCoarse, NoRoot
from .pekeris import centrifugal_exact, centrifugal_pekeris
from .spectra import Convention, offset_window

DEFAULT_N = 6000
SCAN_POINTS = 64


class CentrifugalMode(str, enum.Enum):
    EXACT = "exact"
    PEKERIS = "pekeris"


@dataclass(frozen=True)
class FdGrid:
    r_min: float
    r_max: float
    N: int

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max:
            raise ValueError("need 0 < r_min < r_max")
        if self.N < 2:
            raise ValueError("N must be >= 2")

    @property
    def h(self):
        return (self.r_max - self.r_min) / (self.N + 1)

    @property
    def points(self):
        return self.r_min + self.h * np.arange(1, self.N + 1)

    def refined(self):
        """Same interval, half the spacing."""
        return FdGrid(self.r_min, self.r_max, 2 * self.N + 1)

    @classmethod
    def for_potential(cls, pot, N=DEFAULT_N, r_min=1e-3, span=60.0):
        return cls(r_min, pot.r_e + span / pot.b_h, N)


@dataclass(frozen=True)
class OracleResult:
    E: float
    self_consistency_residual: float
    centrifugal_mode: CentrifugalMode
    grid: FdGrid
    E_coarse: float = float("nan")
    E_fine: float = float("nan")
    E_ref: float = 0.0
    E_rel: float = float("nan")


def fd_eigenvalue(veff, grid, n):
    """n-th smallest eigenvalue of -d^2/dr^2 + veff on the grid (3-point, Dirichlet)."""
    h2 = grid.h * grid.h
    d = 2.0 / h2 + np.asarray(veff, dtype=float)
    e = np.full(grid.N - 1, -1.0 / h2)
    w = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(n, n))
    return float(w[0])


def fd_mode_eigenvalue(op_builder, E_trial, n, grid):
    """mu_n(E_trial) where op_builder(E, r) returns the effective potential on r."""
    return fd_eigenvalue(op_builder(E_trial, grid.points), grid, n)


def effective_builder(sym, pot, kappa, mode=CentrifugalMode.PEKERIS, relative=False):
    """op_builder(E, r) for the effective potential; with relative=True the
    first argument is the offset t = E - sym.threshold instead of E."""
    eta = sym.eta(kappa)
    mode = CentrifugalMode(mode)
    gamma = sym.gamma_rel if relative else sym.gamma

    def build(E, r):
        if mode is CentrifugalMode.EXACT:
            w = centrifugal_exact(eta, r)
        else:
            w = centrifugal_pekeris(eta, pot, r=r, warn=False)
        return w + gamma(E) * pot(r)

    return build


def _solve_on_grid(sym, pot, n, kappa, mode, grid, windows):
    """Offset t of the self-consistent level and g there."""
    build = effective_builder(sym, pot, kappa, mode, relative=True)

    def g(t):
        return fd_mode_eigenvalue(build, t, n, grid) + sym.beta_sq_rel(t)

    for lo, hi in windows:
        ts = np.linspace(lo, hi, SCAN_POINTS + 2)[1:-1]
        vals = np.array([g(t) for t in ts])
        idx = np.nonzero(vals[:-1] * vals[1:] < 0)[0]
        if idx.size:
            i = idx[0]
            t = bisect(g, ts[i], ts[i + 1], xtol=1e-15 * (hi - lo), rtol=1e-13, maxiter=200)
            return t, g(t)
    raise NoRoot(f"no sign change of mu_n + beta^2 for n={n} kappa={kappa}")


def solve_self_consistent(sym, pot, n, kappa, mode=CentrifugalMode.PEKERIS, grid=None,
                          richardson=True, tol=1e-6):
    """Self-consistent FD energy on the physical window.

    With richardson=True the result is extrapolated from spacings h and h/2;
    GridTooCoarse is raised if those two differ by more than 1e3 * tol relative.
    """
    grid = grid or FdGrid.for_potential(pot)
    windows = offset_window(sym, pot, kappa, Convention.PHYSICAL)
    if not windows:
        raise NoRoot("empty physical window")
    a = sym.threshold
    t1, g1 = _solve_on_grid(sym, pot, n, kappa, mode, grid, windows)
    if not richardson:
        return OracleResult(a + t1, g1, CentrifugalMode(mode), grid, a + t1, a + t1, a, t1)
    fine = grid.refined()
    t2, g2 = _solve_on_grid(sym, pot, n, kappa, mode, fine, windows)
    if abs(t2 - t1) > 1e3 * tol * max(abs(a + t2), abs(t2)):
        raise GridTooCoarse(f"h -> h/2 moved E from {a + t1!r} to {a + t2!r}")
    t = (4.0 * t2 - t1) / 3.0
    return OracleResult(a + t, g2, CentrifugalMode(mode), fine, a + t1, a + t2, a, t)


def solve_nonrel_fd(mu, pot, n, l, mode=CentrifugalMode.EXACT, grid=None):
    """Schroedinger energies (hbar = 1) of -u''/(2 mu) + [l(l+1) W/(2 mu) + V] u = E u."""
    grid = grid or FdGrid.for_potential(pot)
    eta = l * (l + 1)
    out = []
    for gr in (grid, grid.refined()):
        r = gr.points
        w = centrifugal_exact(eta, r) if CentrifugalMode(mode) is CentrifugalMode.EXACT \
            else centrifugal_pekeris(eta, pot, r=r, warn=False)
        out.append(fd_eigenvalue(w + 2.0 * mu * pot(r), gr, n) / (2.0 * mu))
    return (4.0 * out[1] - out[0]) / 3.0
