import numpy as np
import pytest

from hcctree.tree import WeightedTree, tree_path_metric

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def random_metric(rng, n, integer=False, high=10):
    """Shortest-path closure of random pair weights: always a metric."""
    if integer:
        w = rng.integers(1, high + 1, size=(n, n)).astype(float)
    else:
        w = rng.uniform(0.1, high, size=(n, n))
    w = np.triu(w, 1)
    d = w + w.T
    for k in range(n):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return d


def random_tree(rng, n_points, extra=None, integer=False):
    """Random weighted tree whose first ``n_points`` nodes are the points."""
    extra = n_points - 2 if extra is None else extra
    N = max(n_points + extra, 1)
    order = rng.permutation(N)
    edges, weights = [], []
    for k in range(1, N):
        edges.append((order[rng.integers(0, k)], order[k]))
        weights.append(float(rng.integers(1, 6)) if integer else float(rng.uniform(0.1, 3)))
    return WeightedTree(n_points, N, np.array(edges).reshape(-1, 2), weights)


def random_tree_metric(rng, n, integer=False):
    return tree_path_metric(random_tree(rng, n, integer=integer))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
