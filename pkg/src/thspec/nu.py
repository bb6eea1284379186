"""Parametric Nikiforov-Uvarov machinery.

Solves the template

    psi'' + (c1 - c2 s)/(s (1 - c3 s)) psi' + (-xi1 s^2 + xi2 s - xi3)/(s^2 (1 - c3 s)^2) psi = 0

through the constants c4..c13, the quantization condition and the Jacobi
polynomial eigenfunctions. The engine never sees energies; callers embed them
in the xi coefficients.

Both square roots sqrt(c8), sqrt(c9) carry an optional branch sign. The
principal choice (+1, +1) is the textbook one; other choices give formal
roots of the same squared exponent relation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import C3Zero, InvalidExponent, NegativeRadicand

PRINCIPAL = (1, 1)


@dataclass(frozen=True)
class NuProblem:
    c1: float
    c2: float
    c3: float
    xi1: float
    xi2: float
    xi3: float


@dataclass(frozen=True)
class NuConstants:
    c4: float
    c5: float
    c6: float
    c7: float
    c8: float
    c9: float
    c10: float
    c11: float
    c12: float
    c13: float
    root8: float  # signed sqrt(c8)
    root9: float  # signed sqrt(c9)
    flags: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class NuIntermediates:
    pi_coeffs: tuple  # (constant, linear)
    k: float
    tau_coeffs: tuple
    tau_prime: float


def _base_constants(c1, c2, c3, xi1, xi2, xi3):
    c4 = 0.5 * (1.0 - c1)
    c5 = 0.5 * (c2 - 2.0 * c3)
    c6 = c5 * c5 + xi1
    c7 = 2.0 * c4 * c5 - xi2
    c8 = c4 * c4 + xi3
    c9 = c3 * (c7 + c3 * c8) + c6
    return c4, c5, c6, c7, c8, c9


def derive_constants(p, signs=PRINCIPAL):
    if p.c3 == 0:
        raise C3Zero("c3 = 0: general NU branch undefined, use the Morse closed forms")
    c4, c5, c6, c7, c8, c9 = _base_constants(p.c1, p.c2, p.c3, p.xi1, p.xi2, p.xi3)
    if c8 < 0:
        raise NegativeRadicand("c8", c8)
    if c9 < 0:
        raise NegativeRadicand("c9", c9)
    s8, s9 = signs
    r8 = s8 * np.sqrt(c8)
    r9 = s9 * np.sqrt(c9)
    c10 = p.c1 + 2.0 * c4 + 2.0 * r8 - 1.0
    c11 = 1.0 - p.c1 - 2.0 * c4 + 2.0 / p.c3 * r9
    c12 = c4 + r8
    c13 = -c4 + (r9 - c5) / p.c3
    flags = {
        "c8>=0": True,
        "c9>=0": True,
        "c10>-1": c10 > -1,
        "c11>-1": c11 > -1,
        "c12>0": c12 > 0,
        "c13>0": c13 > 0,
    }
    return NuConstants(c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, r8, r9, flags)


def residual_terms(c1, c2, c3, xi1, xi2, xi3, n, signs=PRINCIPAL):
    """Individual summands of the quantization condition (array friendly).

    Negative radicands give NaN instead of raising, so energy scans can mask them.
    """
    c4, c5, c6, c7, c8, c9 = _base_constants(c1, c2, c3, xi1, xi2, xi3)
    with np.errstate(invalid="ignore"):
        r8 = signs[0] * np.sqrt(c8)
        r9 = signs[1] * np.sqrt(c9)
    return (
        c2 * n,
        -(2 * n + 1) * c5,
        (2 * n + 1) * (r9 + c3 * r8),
        n * (n - 1) * c3,
        c7,
        2.0 * c3 * c8,
        2.0 * r8 * r9,
    )


def energy_residual(p, n, signs=PRINCIPAL):
    """c2 n - (2n+1) c5 + (2n+1)(sqrt c9 + c3 sqrt c8) + n(n-1) c3 + c7 + 2 c3 c8 + 2 sqrt(c8 c9)."""
    c4, c5, c6, c7, c8, c9 = _base_constants(p.c1, p.c2, p.c3, p.xi1, p.xi2, p.xi3)
    if c8 < 0:
        raise NegativeRadicand("c8", c8)
    if c9 < 0:
        raise NegativeRadicand("c9", c9)
    return float(sum(residual_terms(p.c1, p.c2, p.c3, p.xi1, p.xi2, p.xi3, n, signs)))


def residual_scale(p, n, signs=PRINCIPAL):
    """Sum of magnitudes of the residual's summands; the yardstick for 'zero'."""
    terms = residual_terms(p.c1, p.c2, p.c3, p.xi1, p.xi2, p.xi3, n, signs)
    return float(sum(abs(t) for t in terms))


def wavefunction_params(k, c3=1.0):
    """(exponent of s, exponent of 1 - c3 s, Jacobi a, Jacobi b) = (c12, c13, c10, c11).

    c13 > 0 is only needed when 1 - c3 s can reach zero, i.e. for c3 > 0.
    With c3 < 0 the factor grows with s and a negative power still decays.
    """
    if not k.c12 > 0:
        raise InvalidExponent(f"c12 = {k.c12} <= 0: no decay as s -> 0")
    if c3 > 0 and not k.c13 > 0:
        raise InvalidExponent(f"c13 = {k.c13} <= 0")
    return k.c12, k.c13, k.c10, k.c11


def nu_intermediates(k, p):
    lam = k.root9 + p.c3 * k.root8
    pi_coeffs = (k.c4 + k.root8, k.c5 - lam)
    kk = -(k.c7 + 2.0 * p.c3 * k.c8) - 2.0 * k.root8 * k.root9
    tau_coeffs = (p.c1 + 2.0 * k.c4 + 2.0 * k.root8, -(p.c2 - 2.0 * k.c5) - 2.0 * lam)
    return NuIntermediates(pi_coeffs, kk, tau_coeffs, tau_coeffs[1])


# -- Jacobi polynomials ------------------------------------------------------


def _recurrence_step(m, a, b, x, p1, p2):
    s = 2 * m + a + b
    A = 2 * m * (m + a + b) * (s - 2)
    B = (s - 1) * (s * (s - 2) * x + a * a - b * b)
    C = 2 * (m + a - 1) * (m + b - 1) * s
    return (B * p1 - C * p2) / A


def jacobi_eval(n, a, b, x):
    """P_n^(a,b)(x) by upward three-term recurrence in n."""
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    if n == 0:
        return p0 if p0.ndim else float(p0)
    p1 = (a + 1) + (a + b + 2) * (x - 1) / 2
    for m in range(2, n + 1):
        p0, p1 = p1, _recurrence_step(m, a, b, x, p1, p0)
    return p1 if p1.ndim else float(p1)


def _hyp_sum(n, a, b, x):
    """Terminating 2F1 sum in exact rational arithmetic, rounded once at the end."""
    a, b = Fraction(a), Fraction(b)
    out = np.empty_like(x)
    for i, xi in np.ndenumerate(x):
        z = (1 - Fraction(xi)) / 2
        term, total = Fraction(1), Fraction(1)
        for k in range(n):
            term *= (k - n) * (n + a + b + 1 + k) * z / ((a + 1 + k) * (k + 1))
            total += term
        pref = Fraction(1)
        for k in range(n):
            pref *= (a + 1 + k) / (k + 1)
        out[i] = float(pref * total)
    return out


def jacobi_hypergeometric(n, a, b, x):
    """(a+1)_n/n! * 2F1(-n, n+a+b+1; a+1; (1-x)/2), summed exactly.

    Slow; meant as an independent reference for jacobi_eval.
    """
    x = np.asarray(x, dtype=float)
    out = _hyp_sum(n, a, b, np.atleast_1d(x)).reshape(x.shape)
    return out if out.ndim else float(out)


def jacobi_log_eval(n, a, b, x):
    """(sign, log|P_n^(a,b)(x)|) with rescaling, for large indices."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    logscale = np.zeros_like(x)
    p0 = np.ones_like(x)
    if n == 0:
        return np.sign(p0), logscale
    p1 = (a + 1) + (a + b + 2) * (x - 1) / 2
    for m in range(2, n + 1):
        p0, p1 = p1, _recurrence_step(m, a, b, x, p1, p0)
        big = np.maximum(np.abs(p0), np.abs(p1))
        rescale = big > 1e100
        if np.any(rescale):
            f = np.where(rescale, big, 1.0)
            p0 = p0 / f
            p1 = p1 / f
            logscale = logscale + np.log(f)
    with np.errstate(divide="ignore"):
        return np.sign(p1), logscale + np.log(np.abs(p1))


def jacobi_derivative(n, a, b, x):
    """d/dx P_n^(a,b)(x) = (n + a + b + 1)/2 P_{n-1}^(a+1,b+1)(x)."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        out = np.zeros_like(x)
        return out if out.ndim else float(out)
    return 0.5 * (n + a + b + 1) * jacobi_eval(n - 1, a + 1, b + 1, x)
