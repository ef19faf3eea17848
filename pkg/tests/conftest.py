import numpy as np
import pytest

from areatrap.sampler import PointCloud, SeedSpec, sample_poisson_square


def cloud_of(n, pts):
    return PointCloud.from_points(n, pts)


def small_cloud(seed, n=4.0, max_points=12):
    """First cloud at or after trial ``seed`` with at most max_points points."""
    i = seed
    while True:
        c = sample_poisson_square(n, SeedSpec(1234, i))
        if c.count <= max_points:
            return c
        i += 1000


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# acceptance verdict lines, printed as one block at the end of the run
VERDICTS: list = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(VERDICTS):
            terminalreporter.write_line(line)
