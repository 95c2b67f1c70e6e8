import numpy as np
import pytest

from senti17.synthetic import write_desk_corpus


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def desk_corpus(tmp_path_factory):
    return write_desk_corpus(tmp_path_factory.mktemp("desk"), n_train=60, n_dev=30, n_test=30)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
