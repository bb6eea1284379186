import pytest

from thspec.tables import preset

ACCEPTANCE_LINES = []


def record(number, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def spin_setup():
    return preset("table2")


@pytest.fixture(scope="session")
def pspin_setup():
    return preset("table3")


@pytest.fixture(scope="session")
def pspin_bound():
    """Pseudospin configuration that actually binds: window (-M, D - M) is nonempty."""
    from thspec.core import SymmetryConfig, ThPotential

    return SymmetryConfig("pspin", 10.0, -20.0), ThPotential(5.0, 0.988879, 2.40873, 0.01)
