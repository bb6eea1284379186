"""Energy equations and bound-state energies for the Dirac-Tietz-Hua problem.

The xi coefficients come from expanding

    eta * Vso(s) + gamma * V(s) + beta^2

over the common denominator s^2 (1 - c_h s)^2 with s = exp(-alpha x). That
expansion feeds the generic NU engine in :mod:`thspec.nu`.

Two residual conventions are available:

``physical``
    principal square roots. Roots are normalizable states, and they agree with
    the finite-difference solution of the radial equation.
``tabulated``
    the root branch and constant term used to produce the published spectra:
    sqrt(c8) -> -sqrt(c8) (spin) or sqrt(c9) -> -sqrt(c9) (pspin), plus a
    constant -c_h. The decay exponent of these roots is negative, so they are
    formal roots of the quantization condition, not normalizable states.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import bisect
from scipy.special import eval_genlaguerre

from . import nu
from .core import Branch, QuantumState, SymmetryConfig, ThPotential
from .errors import OutsideWindow, ThSpecError
from .pekeris import coefficients_from, pekeris_coefficients

log = logging.getLogger(__name__)

GRID_POINTS = 4096
ORIGIN_RATIO = 1e-6
MORSE_SWITCH = 1e-9  # |c_h| below this: eigenfunctions use the Laguerre (c -> 0) limit
ROOT_RTOL = 4 * np.finfo(float).eps  # bisect down to the last few ulps
MERGE_FRACTION = 1e-9


class Convention(str, enum.Enum):
    TABULATED = "tabulated"
    PHYSICAL = "physical"


DEFAULT_CONVENTION = Convention.TABULATED

_TABULATED_SIGNS = {Branch.SPIN: (-1, 1), Branch.PSPIN: (1, -1)}


def radical_signs(branch, convention):
    if Convention(convention) is Convention.PHYSICAL:
        return nu.PRINCIPAL
    return _TABULATED_SIGNS[Branch(branch)]


def constant_offset(c_h, convention):
    return -c_h if Convention(convention) is Convention.TABULATED else 0.0


@dataclass(frozen=True)
class BranchKinematics:
    gamma: float
    beta_sq: float


def kinematics(sym, E):
    return BranchKinematics(sym.gamma(E), sym.beta_sq(E))


@dataclass(frozen=True)
class EnergyLevel:
    state: QuantumState
    branch: Branch
    model: str  # "TH", "MorseI", "MorseII" or "NonRel"
    E: float
    residual: float
    scale: float
    bracket: tuple
    iterations: int
    convention: Convention
    E_ref: float = 0.0  # E = E_ref + E_rel, with E_rel carried at full precision
    E_rel: float = float("nan")

    @property
    def label(self):
        return self.state.label(self.branch)


# -- coefficient assembly ----------------------------------------------------


def xi_coefficients(eta, gamma, beta_sq, D, r_e, alpha, c_h, coeffs, v_shift=0.0):
    """xi1, xi2, xi3 of  -(xi1 s^2 - xi2 s + xi3) = -(1/alpha^2) * bracket.

    bracket = eta [D0 (1-cs)^2 + D1 s (1-cs) + D2 s^2]
              + gamma D r_e^2 (1-s)^2 + (beta^2 + gamma v_shift) r_e^2 (1-cs)^2

    Works on numpy arrays and on numpy poly1d objects alike.
    """
    D0, D1, D2 = coeffs.as_tuple()
    c = c_h
    R = r_e * r_e
    a2 = alpha * alpha
    flat = (beta_sq + gamma * v_shift) * R
    xi1 = (eta * (D0 * c * c - D1 * c + D2) + gamma * D * R + flat * c * c) / a2
    xi2 = (-eta * (D1 - 2.0 * D0 * c) + 2.0 * gamma * D * R + 2.0 * flat * c) / a2
    xi3 = (eta * D0 + gamma * D * R + flat) / a2
    return xi1, xi2, xi3


def _potential_shift(pot, model):
    return -pot.D if model == "MorseII" else 0.0


def _template_c(pot, model):
    return 0.0 if model in ("MorseI", "MorseII") else pot.c_h


def _coeffs(pot, model):
    return coefficients_from(pot.alpha, 0.0) if model in ("MorseI", "MorseII") else pekeris_coefficients(pot)


def _offset(sym, E, t=None):
    return E - sym.threshold if t is None else t


def build_nu_input(sym, pot, state, E, convention=DEFAULT_CONVENTION, *, check_window=True, t=None):
    """NuProblem (c1=1, c2=c3=c_h) for one trial energy.

    Pass t = E - sym.threshold as well when E sits close to the threshold
    and must not lose precision.
    """
    t = _offset(sym, E, t)
    if check_window and Convention(convention) is Convention.TABULATED and not sym.beta_sq_rel(t) > 0:
        raise OutsideWindow(f"beta^2({E}) <= 0")
    eta = state.eta(sym.branch)
    xi1, xi2, xi3 = xi_coefficients(
        eta, sym.gamma_rel(t), sym.beta_sq_rel(t), pot.D, pot.r_e, pot.alpha, pot.c_h,
        pekeris_coefficients(pot),
    )
    return nu.NuProblem(1.0, pot.c_h, pot.c_h, float(xi1), float(xi2), float(xi3))


def _residual_array(sym, pot, eta, n, t, convention, model):
    """Residual and its scale at offsets t = E - threshold."""
    c = _template_c(pot, model)
    xi1, xi2, xi3 = xi_coefficients(
        eta, sym.gamma_rel(t), sym.beta_sq_rel(t), pot.D, pot.r_e, pot.alpha, c,
        _coeffs(pot, model), _potential_shift(pot, model),
    )
    signs = radical_signs(sym.branch, convention)
    terms = nu.residual_terms(1.0, c, c, xi1, xi2, xi3, n, signs)
    off = constant_offset(c, convention)
    res = sum(terms) + off
    scale = sum(np.abs(t) for t in terms) + abs(off)
    return res, scale


def _scalar_residual(sym, pot, state, E, convention, model):
    if Convention(convention) is Convention.TABULATED and not sym.beta_sq(E) > 0:
        raise OutsideWindow(f"beta^2({E}) <= 0")
    t = np.float64(E - sym.threshold)
    res, _ = _residual_array(sym, pot, state.eta(sym.branch), state.n, t, convention, model)
    if not np.isfinite(res):
        # surfaces as NegativeRadicand via the engine
        nu.energy_residual(build_nu_input(sym, pot, state, E, convention, check_window=False)
                           if model == "TH" else _morse_problem(sym, pot, state, E), state.n)
    return float(res)


def _morse_problem(sym, pot, state, E, version=1):
    model = "MorseI" if version == 1 else "MorseII"
    xi = xi_coefficients(
        state.eta(sym.branch), sym.gamma(E), sym.beta_sq(E), pot.D, pot.r_e, pot.alpha, 0.0,
        _coeffs(pot, model), _potential_shift(pot, model),
    )
    return nu.NuProblem(1.0, 0.0, 0.0, *map(float, xi))


def energy_residual(sym, pot, state, E, convention=DEFAULT_CONVENTION):
    return _scalar_residual(sym, pot, state, E, convention, "TH")


def spin_energy_residual(sym, pot, state, E, convention=DEFAULT_CONVENTION):
    if sym.branch is not Branch.SPIN:
        raise ValueError("spin_energy_residual needs a spin-branch SymmetryConfig")
    return energy_residual(sym, pot, state, E, convention)


def pspin_energy_residual(sym, pot, state, E, convention=DEFAULT_CONVENTION):
    if sym.branch is not Branch.PSPIN:
        raise ValueError("pspin_energy_residual needs a pspin-branch SymmetryConfig")
    return energy_residual(sym, pot, state, E, convention)


def _check_morse(pot):
    if pot.c_h != 0:
        raise ValueError("Morse residuals need a potential with c_h = 0")


def morse_energy_residual(sym, pot, state, E, version=1, convention=DEFAULT_CONVENTION):
    """Closed-form Morse quantization:

    (2n+1) sqrt(A) + 2 sqrt(A C) + B = 0
    A = (eta D2 + gamma D r_e^2)/alpha^2, B = (eta D1 - 2 gamma D r_e^2)/alpha^2,
    C = (eta D0 + [gamma D] + beta^2 r_e^2)/alpha^2, with [gamma D] present in version I only.
    """
    _check_morse(pot)
    model = "MorseI" if version == 1 else "MorseII"
    return _scalar_residual(sym, pot, state, E, convention, model)


def morse_spin_residual(sym, pot, state, E, version=1, convention=DEFAULT_CONVENTION):
    if sym.branch is not Branch.SPIN:
        raise ValueError("morse_spin_residual needs a spin-branch SymmetryConfig")
    return morse_energy_residual(sym, pot, state, E, version, convention)


def morse_pspin_residual(sym, pot, state, E, version=1, convention=DEFAULT_CONVENTION):
    if sym.branch is not Branch.PSPIN:
        raise ValueError("morse_pspin_residual needs a pspin-branch SymmetryConfig")
    return morse_energy_residual(sym, pot, state, E, version, convention)


# -- energy window -----------------------------------------------------------


def _nonneg_intervals(poly, lo=-np.inf, hi=np.inf):
    """Intervals of [lo, hi] where poly >= 0."""
    poly = np.poly1d(poly)
    if poly.order == 0 and not np.any(poly.coeffs):
        return [(lo, hi)]
    cuts = sorted(float(r.real) for r in np.atleast_1d(poly.roots) if abs(r.imag) < 1e-12 and lo < r.real < hi)
    edges = [lo] + cuts + [hi]
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        if np.isinf(a) and np.isinf(b):
            mid = 0.0
        elif np.isinf(a):
            mid = b - 1.0 - abs(b)
        elif np.isinf(b):
            mid = a + 1.0 + abs(a)
        else:
            mid = 0.5 * (a + b)
        if poly(mid) >= 0:
            if out and out[-1][1] == a:
                out[-1] = (out[-1][0], b)
            else:
                out.append((a, b))
    return out


def _intersect(xs, ys):
    out = []
    for a0, a1 in xs:
        for b0, b1 in ys:
            lo, hi = max(a0, b0), min(a1, b1)
            if lo < hi:
                out.append((lo, hi))
    return out


def energy_window(sym, pot, kappa, convention=DEFAULT_CONVENTION, model="TH"):
    """Intervals of E where both radicands are real (and beta^2 > 0 for 'tabulated')."""
    a = sym.threshold
    return [(a + lo, a + hi) for lo, hi in offset_window(sym, pot, kappa, convention, model)]


def offset_window(sym, pot, kappa, convention=DEFAULT_CONVENTION, model="TH"):
    """energy_window expressed in t = E - sym.threshold."""
    eta = QuantumState(0, kappa).eta(sym.branch)
    c = _template_c(pot, model)
    g, b2 = sym.gamma_rel_poly(), sym.beta_sq_rel_poly()
    xi1, xi2, xi3 = xi_coefficients(
        eta, g, b2, pot.D, pot.r_e, pot.alpha, c, _coeffs(pot, model), _potential_shift(pot, model)
    )
    c8 = xi3
    c9 = xi1 - c * xi2 + c * c * xi3 + c * c / 4.0
    win = _intersect(_nonneg_intervals(c8), _nonneg_intervals(c9))
    if Convention(convention) is Convention.TABULATED:
        win = _intersect(win, _nonneg_intervals(b2))
    else:
        win = _intersect(win, _variational_floor(sym, pot, eta, model))
    return [(lo, hi) for lo, hi in win if np.isfinite(lo) and np.isfinite(hi)]


def _pekeris_range(pot, coeffs):
    """min and max of D0 + D1 y + D2 y^2 over the y = u/(1 - c u) values met on r >= 0."""
    c = pot.c_h
    u_max = np.exp(pot.alpha)
    y_max = u_max / (1.0 - c * u_max) if c * u_max < 1 else np.inf
    D0, D1, D2 = coeffs.as_tuple()
    ys = [0.0, y_max]
    if D2 != 0 and 0 < -D1 / (2 * D2) < y_max:
        ys.append(-D1 / (2 * D2))
    vals = [D0 + D1 * y + D2 * y * y if np.isfinite(y) else np.sign(D2 or D1) * np.inf for y in ys]
    return min(vals), max(vals)


def _variational_floor(sym, pot, eta, model):
    """Offsets t where -beta^2 >= min_r [eta W(r) + gamma V(r)].

    The Dirichlet eigenvalue -beta^2 cannot lie below the minimum of the
    effective potential, which rules out most of the radicand window.
    """
    c = _template_c(pot, model)
    w_min, _ = _pekeris_range(replace(pot, c_h=c) if c != pot.c_h else pot, _coeffs(pot, model))
    w_floor = eta * w_min / pot.r_e**2
    shift = _potential_shift(pot, model)
    if c * np.exp(pot.alpha) < 1:
        u0 = np.exp(pot.alpha)
        v_top = max(pot.D * ((1 - u0) / (1 - c * u0)) ** 2, pot.D) + shift
    else:
        v_top = np.inf
    v_bottom = shift
    g, b2 = sym.gamma_rel_poly(), sym.beta_sq_rel_poly()
    e_gamma = -sym.delta
    # gamma >= 0 above e_gamma: floor uses the bottom of V, below it uses the top
    upper = _nonneg_intervals(-b2 - w_floor - g * v_bottom, e_gamma, np.inf)
    if np.isfinite(v_top):
        lower = _nonneg_intervals(-b2 - w_floor - g * v_top, -np.inf, e_gamma)
    else:
        lower = []
    return lower + upper


# -- root finding ------------------------------------------------------------


def _find_roots(f_vec, f_scalar, intervals, grid_points, rtol):
    found = []
    for lo, hi in intervals:
        width = hi - lo
        t = np.linspace(1e-12, 1.0 - 1e-12, grid_points)
        Es = lo + width * t
        vals = f_vec(Es)
        ok = np.isfinite(vals)
        for i in range(grid_points - 1):
            if not (ok[i] and ok[i + 1]):
                continue
            a, b = Es[i], Es[i + 1]
            if vals[i] == 0.0:
                found.append((a, (a, a), 0, width))
                continue
            if vals[i] * vals[i + 1] < 0:
                root, info = bisect(f_scalar, a, b, xtol=1e-15 * max(width, 1e-300), rtol=rtol,
                                    maxiter=500, full_output=True)
                found.append((root, (a, b), info.iterations, width))
        if ok[-1] and vals[-1] == 0.0:
            found.append((Es[-1], (Es[-1], Es[-1]), 0, width))
    found.sort(key=lambda t: t[0])
    merged = []
    for item in found:
        if merged and abs(item[0] - merged[-1][0]) < MERGE_FRACTION * item[3]:
            continue
        merged.append(item)
    return merged


def origin_log_ratio(sym, pot, state, E, t=None):
    """log(|psi(r=0)| / max|psi|) for the principal-branch eigenfunction.

    Bound states of the radial equation vanish at the origin; the NU form
    does not impose that, so roots whose eigenfunction stays large at r = 0
    are artifacts of the approximate barrier.
    """
    prob = build_nu_input(sym, pot, state, E, check_window=False, t=t)
    c = pot.c_h
    r = np.concatenate([[0.0], np.linspace(1e-3 * pot.r_e, pot.r_e + 60.0 / pot.b_h, 4000)])
    s = np.exp(-pot.b_h * (r - pot.r_e))
    if abs(c) < MORSE_SWITCH:
        lam, eps = np.sqrt(prob.xi1), np.sqrt(prob.xi3)
        with np.errstate(divide="ignore"):
            logv = eps * np.log(s) - lam * s + np.log(np.abs(eval_genlaguerre(state.n, 2 * eps, 2 * lam * s)))
    else:
        k = nu.derive_constants(prob)
        _, logp = nu.jacobi_log_eval(state.n, k.c10, k.c11, 1.0 - 2.0 * c * s)
        logv = k.c12 * np.log(s) + k.c13 * np.log1p(-c * s) + logp
    finite = logv[np.isfinite(logv)]
    return float(logv[0] - finite.max()) if finite.size else 0.0


def is_admissible(sym, pot, state, E, t=None):
    """Normalizable principal-branch eigenfunction that vanishes at r = 0."""
    try:
        prob = build_nu_input(sym, pot, state, E, check_window=False, t=t)
        if abs(pot.c_h) < MORSE_SWITCH:
            if not (prob.xi1 > 0 and prob.xi3 > 0):
                return False
        else:
            nu.wavefunction_params(nu.derive_constants(prob), prob.c3)
    except ThSpecError:
        return False
    return origin_log_ratio(sym, pot, state, E, t) < np.log(ORIGIN_RATIO)


def solve_levels(sym, pot, n, kappa, convention=DEFAULT_CONVENTION, model="TH",
                 grid_points=GRID_POINTS, rtol=ROOT_RTOL):
    """All roots of the energy equation for (n, kappa), sorted by E.

    An empty list means no sign change exists in the window; it is logged,
    not raised.
    """
    convention = Convention(convention)
    if model == "TH" and pot.c_h == 0:
        model = "MorseI"  # exact c_h -> 0 limit; the general NU branch needs c3 != 0
    if model in ("MorseI", "MorseII"):
        _check_morse(pot)
    state = QuantumState(n, kappa)
    eta = state.eta(sym.branch)

    def f_vec(t):
        return _residual_array(sym, pot, eta, n, t, convention, model)[0]

    def f_scalar(t):
        return float(f_vec(np.float64(t)))

    a = sym.threshold
    intervals = offset_window(sym, pot, kappa, convention, model)
    levels = []
    for t, bracket, iters, _ in _find_roots(f_vec, f_scalar, intervals, grid_points, rtol):
        E = a + t
        if convention is Convention.PHYSICAL and model == "TH" and not is_admissible(sym, pot, state, E, t):
            log.info("dropping root E=%.9g: eigenfunction not admissible", E)
            continue
        res, scale = _residual_array(sym, pot, eta, n, np.float64(t), convention, model)
        levels.append(EnergyLevel(state, sym.branch, model, float(E), float(res), float(scale),
                                  (a + bracket[0], a + bracket[1]), int(iters), convention,
                                  float(a), float(t)))
    if not levels:
        log.info("no bound state for n=%d kappa=%d (%s, %s, %s)", n, kappa, sym.branch.value,
                 model, convention.value)
    return levels


def solve_morse_levels(sym, pot, n, kappa, version=1, convention=DEFAULT_CONVENTION, **kw):
    pot0 = replace(pot, c_h=0.0) if pot.c_h != 0 else pot
    return solve_levels(sym, pot0, n, kappa, convention, "MorseI" if version == 1 else "MorseII", **kw)


def lowest_level(levels):
    return levels[0] if levels else None


# -- special cases -----------------------------------------------------------


def generalized_morse_value(r, alpha_gmp, r_e, D):
    """D (1 - b/(e^{alpha r} - 1))^2 with b = e^{alpha r_e} - 1."""
    r = np.asarray(r, dtype=float)
    b = np.expm1(alpha_gmp * r_e)
    out = D * (1.0 - b / np.expm1(alpha_gmp * r)) ** 2
    return out if out.ndim else float(out)


def gmp_from(alpha_gmp, r_e, D):
    """Tietz-Hua parameters reproducing the generalized Morse potential."""
    if not alpha_gmp > 0:
        raise ValueError("alpha_gmp must be > 0")
    return ThPotential(D=D, b_h=alpha_gmp, r_e=r_e, c_h=float(np.exp(-alpha_gmp * r_e)))


@dataclass(frozen=True)
class NonRelParams:
    mu: float
    eps: float
    d: float
    xi1: float
    xi2: float
    xi3: float


def nonrel_params(mu, pot, l, E):
    eps = 2.0 * mu * E
    d = 2.0 * mu * pot.D
    D0, D1, D2 = pekeris_coefficients(pot).as_tuple()
    c, a2, R = pot.c_h, pot.alpha**2, pot.r_e**2
    eta = l * (l + 1)
    xi1 = R / a2 * (d - eps * c * c) + eta / a2 * (D0 * c * c - D1 * c + D2)
    xi2 = 2.0 * R / a2 * (d - eps * c) - eta / a2 * (D1 - 2.0 * D0 * c)
    xi3 = R / a2 * (d - eps) + eta / a2 * D0
    return NonRelParams(mu, eps, d, xi1, xi2, xi3)


def _nonrel_array(mu, pot, n, l, E):
    p = nonrel_params(mu, pot, l, E)
    terms = nu.residual_terms(1.0, pot.c_h, pot.c_h, p.xi1, p.xi2, p.xi3, n)
    return sum(terms), sum(np.abs(t) for t in terms)


def nonrel_residual(mu, pot, n, l, E):
    """Schroedinger-limit quantization (hbar = 1), principal branch."""
    p = nonrel_params(mu, pot, l, E)
    return nu.energy_residual(nu.NuProblem(1.0, pot.c_h, pot.c_h, p.xi1, p.xi2, p.xi3), n) \
        if pot.c_h != 0 else float(_nonrel_array(mu, pot, n, l, np.float64(E))[0])


def solve_nonrel(mu, pot, n, l, grid_points=GRID_POINTS, rtol=ROOT_RTOL):
    """Roots E_nl (energy units of D) of the nonrelativistic equation."""
    if l < 0:
        raise ValueError("l must be >= 0")
    eta = l * (l + 1)
    D0 = pekeris_coefficients(pot).D0
    # c8 >= 0  <=>  E <= D + eta D0 / (2 mu r_e^2); c9 does not depend on E
    e_max = pot.D + eta * D0 / (2.0 * mu * pot.r_e**2)
    e_min = -abs(e_max) - pot.D

    def f_vec(E):
        return _nonrel_array(mu, pot, n, l, E)[0]

    def f_scalar(E):
        return float(f_vec(np.float64(E)))

    state = QuantumState(n, -(l + 1))
    out = []
    for E, bracket, iters, _ in _find_roots(f_vec, f_scalar, [(e_min, e_max)], grid_points, rtol):
        res, scale = _nonrel_array(mu, pot, n, l, np.float64(E))
        out.append(EnergyLevel(state, Branch.SPIN, "NonRel", float(E), float(res), float(scale),
                               tuple(map(float, bracket)), int(iters), Convention.PHYSICAL))
    return out
