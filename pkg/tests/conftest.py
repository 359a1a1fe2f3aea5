import numpy as np
import pytest

from graph_restore.graph_core import Multigraph


@pytest.fixture
def k3():
    return Multigraph(3, np.array([[0, 1], [1, 2], [0, 2]]))


@pytest.fixture
def fig1_graph():
    """Eight-node example graph with labels 1..8.

    Node 1 only touches node 3, node 3 touches 1, 2, 4, 6 and node 6 touches
    3, 5, 8; the remaining edges (2-7, 4-5, 7-8) are among unqueried nodes.
    """
    labeled = [(1, 3), (2, 3), (3, 4), (3, 6), (5, 6), (6, 8), (2, 7), (4, 5), (7, 8)]
    lab = np.arange(1, 9)
    e = np.array(labeled) - 1
    return Multigraph(8, e, lab)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list = []


@pytest.fixture
def report_criterion():
    """Record one acceptance line; they are printed together after the run."""
    def record(number, passed, detail):
        ACCEPTANCE_LINES.append((number, "PASS" if passed else "FAIL", detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {number}: {status}  {detail}")
