import numpy as np
import pytest

from baromoist.spectral import Field, Grid, VectorField, dealias


@pytest.fixture
def grid():
    return Grid(32, 2.0 * np.pi)


def band_limited(grid: Grid, seed: int) -> Field:
    """Random field with no energy above the 2/3 cutoff (dealias-invariant)."""
    rng = np.random.default_rng(seed)
    return dealias(Field(grid, rng.standard_normal((grid.n, grid.n))))


def band_limited_vec(grid: Grid, seed: int) -> VectorField:
    return VectorField(band_limited(grid, seed), band_limited(grid, seed + 1000))


def l2(f: Field) -> float:
    return float(np.sqrt(np.sum(f.values**2) * f.grid.cell_area))


def inner(a: Field, b: Field) -> float:
    return float(np.sum(a.values * b.values) * a.grid.cell_area)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
