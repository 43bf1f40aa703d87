import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from eatsim.multiplex import LayerGraph, MultiplexNetwork  # noqa: E402


def random_layer(n, p, gen):
    iu, ju = np.triu_indices(n, k=1)
    keep = gen.random(iu.size) < p
    return LayerGraph(n, np.column_stack([iu[keep], ju[keep]]))


def random_multiplex(n, n_layers, p, gen):
    return MultiplexNetwork(n, tuple(random_layer(n, p, gen) for _ in range(n_layers)))


@pytest.fixture
def gen():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
