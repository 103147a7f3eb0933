from pathlib import Path

import numpy as np
import pytest

from dga_emd.io import ingest

FIXTURE = Path(__file__).resolve().parents[1] / "src" / "dga_emd" / "data" / "synthetic_60.csv"

_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def fixture_path() -> Path:
    return FIXTURE


@pytest.fixture(scope="session")
def fixture_dataset():
    return ingest(FIXTURE)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
