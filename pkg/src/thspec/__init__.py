"""Bound states of the Dirac equation with the Tietz-Hua potential under spin and pseudospin symmetry."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    Branch,
    MoleculeRecord,
    PhysicalConstants,
    QuantumState,
    SymmetryConfig,
    ThPotential,
    load_registry,
    th_potential_value,
    to_natural_units,
)
from .errors import *  # noqa: F401,F403
from .pekeris import PekerisCoefficients, centrifugal_exact, centrifugal_pekeris, pekeris_coefficients  # noqa: F401
from .spectra import (  # noqa: F401
    Convention,
    EnergyLevel,
    energy_residual,
    gmp_from,
    solve_levels,
    solve_morse_levels,
    solve_nonrel,
)
from .oracle import CentrifugalMode, FdGrid, solve_self_consistent  # noqa: F401
from .wavefunctions import SpinorSolution, build_spinor, normalize, solution_grid  # noqa: F401
