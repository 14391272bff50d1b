import numpy as np
import pytest

from hadamard_dse.transform import TransformSpec


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def spec7():
    return TransformSpec(7)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
