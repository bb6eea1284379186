"""Exception hierarchy shared by every thspec module."""


class ThSpecError(Exception):
    """Base class for all thspec errors."""


class PoleInDomain(ThSpecError):
    """The Tietz-Hua denominator vanishes somewhere on r > 0."""


class NegativeRadicand(ThSpecError):
    """A square-root argument (c8 or c9) is negative: no real solution."""

    def __init__(self, which, value):
        self.which = which
        self.value = value
        super().__init__(f"{which} = {value!r} < 0")


class C3Zero(ThSpecError):
    """The general NU branch needs c3 != 0; use the Morse closed forms."""


class OutsideWindow(ThSpecError):
    """Trial energy lies outside the admissible energy window."""


class InvalidExponent(ThSpecError):
    """Wavefunction exponent has the wrong sign for a normalizable state."""


class DegenerateDenominator(ThSpecError):
    """The partner-component prefactor 1/(M + E - C) is singular."""


class NotIntegrable(ThSpecError):
    """Density integral diverges or is not finite."""


class NoRoot(ThSpecError):
    """No sign change of the self-consistency function in the window."""


class GridTooCoarse(ThSpecError):
    """Doubling the grid moved the eigenvalue by more than the tolerance."""


class NoBoundState(ThSpecError):
    """An explicitly requested level does not exist."""


class PekerisRangeWarning(UserWarning):
    """Pekeris form evaluated far from r_e where the expansion is poor."""
