import numpy as np
import pytest

from mvtcond import MVTParams


def random_spd(rng: np.random.Generator, p: int, eps: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((p, p))
    return a @ a.T + eps * np.eye(p)


def random_instance(rng: np.random.Generator, p: int, nu: float) -> MVTParams:
    return MVTParams(rng.normal(scale=2.0, size=p), random_spd(rng, p), nu)


@pytest.fixture
def worked():
    """mu = 0, Sigma = [[2, 1], [1, 3]], nu = 5; observe coordinate 0 at 2."""
    return MVTParams([0.0, 0.0], [[2.0, 1.0], [1.0, 3.0]], 5.0)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
