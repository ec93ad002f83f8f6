"""Shared fixtures and the acceptance summary hook."""

import numpy as np
import pytest

from divlab.fields import (
    AUTO,
    make_capillary_field,
    make_counterexample_field,
    make_twisting_field,
    stream_bump_field,
)

ACCEPTANCE_LINES = []


def record_criterion(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def stream_bump():
    return stream_bump_field()


@pytest.fixture(scope="session")
def twisting8():
    return make_twisting_field(8)


@pytest.fixture(scope="session")
def twisting12():
    return make_twisting_field(12)


@pytest.fixture(scope="session")
def capillary():
    return make_capillary_field(1.0)


@pytest.fixture(scope="session")
def counterexample_auto():
    return make_counterexample_field(4, AUTO)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260819)
