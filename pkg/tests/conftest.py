import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nlslab.grid import FrequencyGrid, SpectralField

settings.register_profile("default", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def grid():
    return FrequencyGrid(256, 8)


def random_field(grid, rng, band=None):
    """Random complex spectrum, optionally restricted to ``band``."""
    c = rng.standard_normal(grid.N) + 1j * rng.standard_normal(grid.N)
    if band is not None:
        c = np.where((grid.xi >= band[0]) & (grid.xi < band[1]), c, 0)
    return SpectralField(grid, c)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
