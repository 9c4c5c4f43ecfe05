from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

# Filled in by test_acceptance.report(); printed after the run.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def faithful_path() -> Path:
    return DATA / "faithful_waiting.csv"


@pytest.fixture(scope="session")
def faithful(faithful_path) -> np.ndarray:
    return np.loadtxt(faithful_path, skiprows=1)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
