import numpy as np
import pytest

from teampursuit import RaceConfig, RiderOrder, TrackGeometry, TransitionStrategy
from teampursuit.physics import RiderParams
from teampursuit.simulator import default_riders


@pytest.fixture(scope="session")
def config():
    return RaceConfig()


@pytest.fixture(scope="session")
def toy_race():
    """Two-lap race ridden as one 500 m turn; rider A's budget binds at ~478 W."""
    riders = default_riders()
    riders["A"] = RiderParams(70.0, 0.190, 20000.0)
    cfg = RaceConfig(geometry=TrackGeometry(laps=2), riders=riders)
    return TransitionStrategy((3, 3, 3)), RiderOrder(), cfg


def grid_optimum(strategy, order, cfg):
    """Brute-force oracle: best penalised fitness over 100..1000 W in 1 W steps."""
    from teampursuit.simulator import RaceModel
    model = RaceModel(strategy, order, cfg)
    values = [model.fitness(np.array([float(p)])) for p in range(100, 1001)]
    i = int(np.argmin(values))
    return 100 + i, values[i]


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            for name, value in getattr(rep, "user_properties", []):
                if name == "acceptance":
                    lines.append(value)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
