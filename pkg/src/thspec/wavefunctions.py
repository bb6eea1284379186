"""Radial Dirac spinors (F, G) for converged levels.

The primary component (F for spin, G for pspin) is the NU eigenfunction

    N s^c12 (1 - c s)^c13 P_n^(c10, c11)(1 - 2 c s),   s = exp(-b_h (r - r_e)),

and the partner follows from the first-order exact-symmetry relation.
Everything is carried as log-magnitude plus sign until the final exponent,
so heavy-molecule indices do not overflow.

For Morse levels, and for |c| so small that c11 ~ 1/c is unusable, the
c -> 0 limit  N s^eps exp(-lam s) L_n^(2 eps)(2 lam s)  is used instead,
with lam = sqrt(xi1) and eps = sqrt(xi3).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad
from scipy.special import eval_genlaguerre

from . import nu
from .core import Branch
from .errors import DegenerateDenominator, InvalidExponent, NotIntegrable
from .spectra import MORSE_SWITCH, _coeffs, _potential_shift, _template_c, build_nu_input, radical_signs, xi_coefficients

QUAD_EPSABS = 1e-10
TAIL_SPAN = 40.0  # integrate up to r_e + TAIL_SPAN / b_h


@dataclass(frozen=True)
class SpinorSolution:
    level: object  # EnergyLevel
    sym: object
    pot: object
    exp_s: float  # c12
    exp_y: float  # c13
    jacobi_a: float  # c10
    jacobi_b: float  # c11
    n: int
    log_norm: float = 0.0
    morse_lambda: float | None = None  # set for the Laguerre (c -> 0) form

    @property
    def norm(self):
        return math.exp(self.log_norm)

    @property
    def component_roles(self):
        if self.sym.branch is Branch.SPIN:
            return {"primary": "F", "partner": "G"}
        return {"primary": "G", "partner": "F"}


def build_spinor(level, sym, pot, normalized=True):
    """Spinor for a converged level; raises InvalidExponent for non-normalizable roots."""
    if level.model in ("MorseI", "MorseII") or abs(pot.c_h) < MORSE_SWITCH:
        sol = _morse_spinor(level, sym, pot)
    else:
        prob = build_nu_input(sym, pot, level.state, level.E, check_window=False, t=_rel(level, sym))
        k = nu.derive_constants(prob, radical_signs(sym.branch, level.convention))
        c12, c13, c10, c11 = nu.wavefunction_params(k, prob.c3)
        sol = SpinorSolution(level, sym, pot, c12, c13, c10, c11, level.state.n)
    # put the peak of the raw primary component near unit size before integrating
    r = sample_grid(pot, 2000)
    _, logp = _primary_log(sol, r)
    sol = replace(sol, log_norm=-float(np.max(logp[np.isfinite(logp)])))
    return normalize(sol) if normalized else sol


def _morse_spinor(level, sym, pot):
    model = level.model if level.model in ("MorseI", "MorseII") else "TH"
    t = _rel(level, sym)
    xi1, xi2, xi3 = xi_coefficients(
        level.state.eta(sym.branch), sym.gamma_rel(t), sym.beta_sq_rel(t), pot.D, pot.r_e, pot.alpha,
        _template_c(pot, model), _coeffs(pot, model), _potential_shift(pot, model),
    )
    if not (xi1 > 0 and xi3 > 0):
        raise InvalidExponent(f"Morse limit needs xi1, xi3 > 0, got {xi1!r}, {xi3!r}")
    lam, eps = math.sqrt(xi1), math.sqrt(xi3)
    n = level.state.n
    # a decaying solution exists only if xi2 / (2 lam) - eps - 1/2 equals n
    n_eff = xi2 / (2.0 * lam) - eps - 0.5
    if abs(n_eff - n) > 1e-6 * (n + 1 + eps):
        raise InvalidExponent(f"level is not a normalizable Morse state (n_eff = {n_eff!r})")
    return SpinorSolution(level, sym, pot, eps, 0.0, 2.0 * eps, math.nan, n, morse_lambda=lam)


def solution_grid(sol, num=400, decades=40.0):
    """Uniform grid on (0, r_max], r_max where the density has decayed by e^-decades.

    The density vanishes at both ends, so the trapezoid rule on this grid
    converges much faster than its nominal second order.
    """
    pot = sol.pot
    r_max = pot.r_e + (decades / (2.0 * sol.exp_s) + 10.0 * (sol.n + 1) / sol.exp_s) / pot.b_h
    return np.linspace(r_max / num, r_max, num)


def _rel(level, sym):
    return level.E_rel if math.isfinite(level.E_rel) else level.E - sym.threshold


def sample_grid(pot, num=1000):
    """Log-spaced near the origin, linear out to r_e + 60/b_h."""
    r_hi = pot.r_e + 60.0 / pot.b_h
    inner = np.geomspace(1e-3 * pot.r_e, pot.r_e, num // 2, endpoint=False)
    outer = np.linspace(pot.r_e, r_hi, num - num // 2)
    return np.concatenate([inner, outer])


def _s(sol, r):
    return np.exp(-sol.pot.b_h * (np.asarray(r, dtype=float) - sol.pot.r_e))


def _poly_value(sol, s):
    """Polynomial factor (Jacobi, or Laguerre in the Morse limit) at s."""
    if sol.morse_lambda is not None:
        return eval_genlaguerre(sol.n, sol.jacobi_a, 2.0 * sol.morse_lambda * s)
    return nu.jacobi_eval(sol.n, sol.jacobi_a, sol.jacobi_b, 1.0 - 2.0 * sol.pot.c_h * s)


def _primary_log(sol, r):
    """(sign, log|primary|) at r, including the normalization constant."""
    c = sol.pot.c_h
    s = _s(sol, r)
    if sol.morse_lambda is not None:
        p = _poly_value(sol, s)
        with np.errstate(divide="ignore"):
            logv = sol.log_norm + sol.exp_s * np.log(s) - sol.morse_lambda * s + np.log(np.abs(p))
        return np.sign(p), logv
    sign, logp = nu.jacobi_log_eval(sol.n, sol.jacobi_a, sol.jacobi_b, 1.0 - 2.0 * c * s)
    logv = sol.log_norm + sol.exp_s * np.log(s) + sol.exp_y * np.log1p(-c * s) + logp
    return sign, logv


def primary_component(sol, r):
    r_arr = np.asarray(r, dtype=float)
    sign, logv = _primary_log(sol, r_arr)
    out = (sign * np.exp(logv)).reshape(r_arr.shape)
    return out if out.ndim else float(out)


def primary_derivative(sol, r):
    """d/dr of the primary component, by the chain rule through s."""
    r_arr = np.asarray(r, dtype=float)
    b, c = sol.pot.b_h, sol.pot.c_h
    s = _s(sol, r_arr)
    if sol.morse_lambda is not None:
        lam, a = sol.morse_lambda, sol.jacobi_a
        envelope = np.exp(sol.log_norm + sol.exp_s * np.log(s) - lam * s)
        x = 2.0 * lam * s
        p = eval_genlaguerre(sol.n, a, x)
        dp = -eval_genlaguerre(sol.n - 1, a + 1, x) if sol.n > 0 else 0.0
        # dx/dr = -b x
        out = envelope * ((-b * sol.exp_s + lam * b * s) * p - b * x * dp)
        return out if np.ndim(out) else float(out)
    x = 1.0 - 2.0 * c * s
    envelope = np.exp(sol.log_norm + sol.exp_s * np.log(s) + sol.exp_y * np.log1p(-c * s))
    p = nu.jacobi_eval(sol.n, sol.jacobi_a, sol.jacobi_b, x)
    dp = nu.jacobi_derivative(sol.n, sol.jacobi_a, sol.jacobi_b, x)
    # ds/dr = -b s, d(1 - c s)/dr = c b s, dx/dr = 2 c b s
    dlog_env = -b * sol.exp_s + sol.exp_y * c * b * s / (1.0 - c * s)
    out = envelope * (dlog_env * p + dp * 2.0 * c * b * s)
    return out if np.ndim(out) else float(out)


def partner_component(sol, r):
    """Spin: G = (F' + kappa F / r)/(M + E - C_s).  Pspin: F = (G' - kappa G / r)/(M - E + C_ps)."""
    den = sol.sym.partner_denominator_rel(_rel(sol.level, sol.sym))
    if den == 0:
        raise DegenerateDenominator("partner prefactor denominator is zero")
    r_arr = np.asarray(r, dtype=float)
    kappa = sol.level.state.kappa
    sgn = 1.0 if sol.sym.branch is Branch.SPIN else -1.0
    out = (primary_derivative(sol, r_arr) + sgn * kappa / r_arr * primary_component(sol, r_arr)) / den
    return out if np.ndim(out) else float(out)


def upper_lower(sol, r):
    """(F, G) at r regardless of branch."""
    p, q = primary_component(sol, r), partner_component(sol, r)
    return (p, q) if sol.sym.branch is Branch.SPIN else (q, p)


def density(sol, r):
    p, q = primary_component(sol, r), partner_component(sol, r)
    return p * p + q * q


def density_integral(sol):
    """Integral of F^2 + G^2 over (0, inf): quadrature plus an exponential tail estimate."""
    pot = sol.pot
    r_max = pot.r_e + TAIL_SPAN / pot.b_h
    near0 = density(sol, 1e-12 * pot.r_e)
    if not np.isfinite(near0):
        raise NotIntegrable(f"density not finite as r -> 0 (value {near0!r})")
    breaks = [p for p in (pot.r_e, pot.r_e + 5.0 / pot.b_h, pot.r_e + 15.0 / pot.b_h) if p < r_max]
    val, _ = quad(lambda t: density(sol, t), 0.0, r_max, epsabs=QUAD_EPSABS, epsrel=1e-12,
                  limit=500, points=breaks)
    # both components decay like s^(2 c12) = exp(-2 c12 b_h r) beyond r_max
    tail = density(sol, r_max) / (2.0 * sol.exp_s * pot.b_h)
    total = val + tail
    if not (np.isfinite(total) and total > 0):
        raise NotIntegrable(f"density integral = {total!r}")
    return total


def normalize(sol):
    """Rescale so that the integral of F^2 + G^2 is 1. Idempotent."""
    total = density_integral(sol)
    return replace(sol, log_norm=sol.log_norm - 0.5 * math.log(total))


def scaled(sol, factor):
    return replace(sol, log_norm=sol.log_norm + math.log(factor))


def node_positions(sol, num=20000):
    """Strict sign changes of the primary component on (0, inf), refined by bisection."""
    pot = sol.pot
    r = np.concatenate([np.geomspace(1e-9 * pot.r_e, pot.r_e, num // 2, endpoint=False),
                        np.linspace(pot.r_e, pot.r_e + 60.0 / pot.b_h, num - num // 2)])
    sign = np.sign(_poly_value(sol, _s(sol, r)))
    nodes = []
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        a, b = r[i], r[i + 1]
        fa = sign[i]
        for _ in range(80):
            m = 0.5 * (a + b)
            fm = np.sign(_poly_value(sol, _s(sol, m)))
            if fm == 0:
                a = b = m
                break
            if fm == fa:
                a = m
            else:
                b = m
        nodes.append(0.5 * (a + b))
    return nodes


def node_count(sol, component="primary"):
    if component != "primary":
        raise ValueError("only the primary component has a guaranteed node count")
    return len(node_positions(sol))
