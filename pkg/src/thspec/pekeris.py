"""Pekeris-type replacement of the (pseudo-)centrifugal barrier eta/r^2.

The barrier is traded for a function with the same exponential shape as the
Tietz-Hua potential, matched to second order in x = (r - r_e)/r_e.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PekerisRangeWarning, PoleInDomain

RANGE_WARN_X = 0.5


@dataclass(frozen=True)
class PekerisCoefficients:
    D0: float
    D1: float
    D2: float

    def as_tuple(self):
        return (self.D0, self.D1, self.D2)


def coefficients_from(alpha, c_h):
    a, c = float(alpha), float(c_h)
    q = 1.0 - c
    D0 = 1.0 - q * (3.0 + c) / a + 3.0 * q**2 / a**2
    D1 = 2.0 * q**2 * (2.0 + c) / a - 6.0 * q**3 / a**2
    D2 = -(q**3) * (1.0 + c) / a + 3.0 * q**4 / a**2
    return PekerisCoefficients(D0, D1, D2)


def pekeris_coefficients(pot):
    return coefficients_from(pot.alpha, pot.c_h)


def centrifugal_exact(eta, r):
    r = np.asarray(r, dtype=float)
    out = eta / r**2
    return out if out.ndim else float(out)


def centrifugal_pekeris(eta, pot, coeffs=None, r=None, *, warn=True):
    """(eta/r_e^2) [D0 + D1 y + D2 y^2] with y = u/(1 - c_h u), u = e^{-alpha x}."""
    if coeffs is None:
        coeffs = pekeris_coefficients(pot)
    r = np.asarray(r, dtype=float)
    x = (r - pot.r_e) / pot.r_e
    if warn and np.any(np.abs(x) > RANGE_WARN_X):
        warnings.warn(
            f"Pekeris form evaluated at |x| > {RANGE_WARN_X}; second-order match only",
            PekerisRangeWarning,
            stacklevel=2,
        )
    u = np.exp(-pot.alpha * x)
    den = 1.0 - pot.c_h * u
    if np.any(den == 0.0):
        raise PoleInDomain("Pekeris denominator vanishes")
    y = u / den
    out = eta / pot.r_e**2 * (coeffs.D0 + coeffs.D1 * y + coeffs.D2 * y * y)
    return out if out.ndim else float(out)
