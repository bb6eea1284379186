import numpy as np
import pytest

from thspec.errors import NoRoot
from thspec.oracle import (
    CentrifugalMode,
    FdGrid,
    effective_builder,
    fd_eigenvalue,
    solve_nonrel_fd,
    solve_self_consistent,
)
from thspec.spectra import solve_levels


def test_grid_validation():
    with pytest.raises(ValueError):
        FdGrid(0.0, 1.0, 10)
    with pytest.raises(ValueError):
        FdGrid(1.0, 2.0, 1)
    g = FdGrid(1.0, 2.0, 9)
    assert g.h == pytest.approx(0.1)
    assert g.refined().h == pytest.approx(g.h / 2)


def test_harmonic_oscillator_sanity():
    # -u'' + r^2 u on the half line with u(0) = 0: odd levels 3, 7, ...
    grid = FdGrid(1e-6, 12.0, 4000)
    r = grid.points
    assert fd_eigenvalue(r**2, grid, 0) == pytest.approx(3.0, rel=1e-4)
    assert fd_eigenvalue(r**2, grid, 1) == pytest.approx(7.0, rel=1e-4)
    # l = 1 barrier shifts the ground level to 5
    assert fd_eigenvalue(r**2 + 2 / r**2, grid, 0) == pytest.approx(5.0, rel=1e-4)


@pytest.mark.parametrize("c", [0.01, -0.01])
@pytest.mark.parametrize("n,k", [(0, -2), (1, 3)])
def test_fd_matches_physical_spin(c, n, k):
    from thspec.core import SymmetryConfig, ThPotential

    sym, pot = SymmetryConfig("spin", 10.0, 10.0), ThPotential(5.0, 0.988879, 2.40873, c)
    nu_E = solve_levels(sym, pot, n, k, "physical")[0].E
    fd = solve_self_consistent(sym, pot, n, k, CentrifugalMode.PEKERIS, FdGrid.for_potential(pot, 3000))
    assert fd.E == pytest.approx(nu_E, rel=1e-6)
    assert abs(fd.E_fine - fd.E_coarse) < 1e-3 * abs(fd.E)


def test_fd_matches_physical_pspin(pspin_bound):
    sym, pot = pspin_bound
    for n, k in ((0, 2), (1, -1)):
        nu_E = solve_levels(sym, pot, n, k, "physical")[0].E
        fd = solve_self_consistent(sym, pot, n, k, "pekeris", FdGrid.for_potential(pot, 3000))
        assert fd.E == pytest.approx(nu_E, rel=1e-6)


def test_exact_barrier_is_self_consistent(spin_setup):
    sym, pot = spin_setup
    grid = FdGrid.for_potential(pot, 3000)
    res = solve_self_consistent(sym, pot, 0, -2, "exact", grid)
    build = effective_builder(sym, pot, -2, "exact", relative=True)
    t = res.E_fine - sym.threshold
    mu = fd_eigenvalue(build(t, res.grid.points), res.grid, 0)
    assert abs(mu + sym.beta_sq_rel(t)) < 1e-9 * max(1.0, abs(mu))


def test_no_root_for_table3_parameters(pspin_setup):
    sym, pot = pspin_setup
    with pytest.raises(NoRoot):
        solve_self_consistent(sym, pot, 1, -1, grid=FdGrid.for_potential(pot, 1000))


def test_builder_relative_matches_absolute(spin_setup):
    sym, pot = spin_setup
    r = np.linspace(0.5, 9.0, 11)
    a = effective_builder(sym, pot, -3, relative=False)(10.02, r)
    b = effective_builder(sym, pot, -3, relative=True)(0.02, r)
    assert np.allclose(a, b, rtol=1e-14)


def test_nonrel_fd_converges_with_grid():
    from thspec.core import ThPotential

    pot = ThPotential(5.0, 0.988879, 2.40873, 0.01)
    a = solve_nonrel_fd(50.0, pot, 0, 1, grid=FdGrid.for_potential(pot, 1500))
    b = solve_nonrel_fd(50.0, pot, 0, 1, grid=FdGrid.for_potential(pot, 3000))
    assert a == pytest.approx(b, rel=1e-5)
