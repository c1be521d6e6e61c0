import pytest

from emrotmatch import shapes
from emrotmatch.edgecurrent import CurrentSet


@pytest.fixture(scope="session")
def centered_rect():
    """32x32 centered bright rectangle, mirror symmetric about both axes."""
    return shapes.rectangle(32, 8.5, 5.5)


@pytest.fixture(scope="session")
def offset_rect():
    """64x64 rectangle shifted right of center; no rotational symmetry about the image center."""
    return shapes.rectangle(64, 12.5, 5.5, offset=(14.0, 0.0))


def random_set(rng, n, z=0.0, extent=20.0, center=(10.0, 10.0)):
    pos = rng.uniform(0.0, extent, size=(n, 2))
    vec = rng.normal(size=(n, 2)) * rng.uniform(0.5, 50.0)
    return CurrentSet(pos, vec, z=z, center=center, dims=(int(extent), int(extent)))


def circ_diff(a, b):
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
