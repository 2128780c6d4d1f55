import numpy as np
import pytest

from polarrep.geometry import Contour

ACCEPTANCE_LINES = []


def star_polygon(rng, center, base, m=256, kmax=7, depth=(0.25, 0.5)):
    """Random star-convex polygon about ``center`` (radial harmonics)."""
    ks = np.arange(2, kmax + 1)
    amp = rng.uniform(0.0, 1.0, size=ks.size) / ks
    amp *= rng.uniform(*depth) / amp.sum()
    phase = rng.uniform(0.0, 2 * np.pi, size=ks.size)
    t = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
    r = base * (1.0 + (amp[:, None] * np.cos(ks[:, None] * t + phase[:, None])).sum(axis=0))
    return Contour(np.stack([center[0] + r * np.cos(t), center[1] + r * np.sin(t)], axis=1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
