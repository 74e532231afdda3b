import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_metric
from golden import SIX_D
from hcctree import oracle
from hcctree.hcc import EdgeOrdering, MergeLog, hcc_triangle, is_highly_connected, partition_at


def random_order(rng, n):
    iu, ju = np.triu_indices(n, 1)
    p = rng.permutation(len(iu))
    flip = rng.random(len(iu)) < 0.5
    a = np.where(flip, ju[p], iu[p])
    b = np.where(flip, iu[p], ju[p])
    return EdgeOrdering(n, np.column_stack([a, b]))


def test_edge_ordering_validation():
    with pytest.raises(ValueError):
        EdgeOrdering(3, [(0, 1), (0, 2)])
    with pytest.raises(ValueError):
        EdgeOrdering(3, [(0, 1), (0, 1), (1, 2)])
    with pytest.raises(ValueError):
        EdgeOrdering(3, [(0, 1), (0, 2), (1, 1)])
    with pytest.raises(ValueError):
        EdgeOrdering(3, [(0, 1), (0, 2), (1, 3)])
    with pytest.raises(ValueError):
        EdgeOrdering(3, [(0, 1), (0, 2), (1, 2)], [2.0, 1.0, 3.0])


def test_from_distances_tie_break():
    d = np.ones((4, 4)) - np.eye(4)
    order = EdgeOrdering.from_distances(d)
    assert order.pairs.tolist() == [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]


def _near_regular_bipartite():
    # x_i sees y_i, y_i+1, y_i+2; dropping (x0, y0) leaves both with degree 2 < 2.5
    X, Y = list(range(5)), list(range(5, 10))
    A = np.zeros((10, 10), dtype=bool)
    for i in range(5):
        for k in range(3):
            y = 5 + (i + k) % 5
            A[i, y] = A[y, i] = True
    A[0, 5] = A[5, 0] = False
    return X, Y, A


def test_highly_connected_examples():
    assert is_highly_connected([0], [1], [(0, 1)])
    assert not is_highly_connected([0], [1], [])
    X, Y, A = _near_regular_bipartite()
    assert not is_highly_connected(X, Y, A)
    A[0, 5] = A[5, 0] = True
    assert is_highly_connected(X, Y, A)
    pairs = list(zip(*np.nonzero(np.triu(A))))
    assert is_highly_connected(X, Y, pairs)


def test_highly_connected_odd_sizes_use_real_half():
    # |Y| = 3 needs 2 neighbours (1 < 1.5); |X| = 2 needs 1
    assert not is_highly_connected([0], [1, 2, 3], [(0, 1)])
    assert is_highly_connected([0], [1, 2, 3], [(0, 1), (0, 2)]) is False  # y3 sees 0 < 0.5
    assert is_highly_connected([0, 4], [1, 2, 3], [(0, 1), (0, 2), (4, 2), (4, 3)])
    assert not is_highly_connected([0, 4], [1, 2, 3], [(0, 1), (0, 2), (4, 2)])


def test_highly_connected_errors():
    with pytest.raises(ValueError):
        is_highly_connected([0, 1], [1, 2], [])
    with pytest.raises(ValueError):
        is_highly_connected([], [1], [])


def test_highly_connected_matches_recount(rng):
    for _ in range(200):
        nx, ny = rng.integers(1, 6, size=2)
        n = nx + ny
        A = np.triu(rng.random((n, n)) < rng.random(), 1)
        A = A | A.T
        X, Y = range(nx), range(nx, n)
        assert is_highly_connected(X, Y, A) == oracle.highly_connected_recount(X, Y, A)


def test_two_points():
    log = hcc_triangle(EdgeOrdering(2, [(0, 1)]))
    assert log.children.tolist() == [[0, 1]] and log.steps.tolist() == [1]


def test_six_point_merge_sequence():
    log = hcc_triangle(EdgeOrdering.from_distances(SIX_D))
    # a b c d e f = 0 1 2 3 4 5
    assert log.children.tolist() == [[0, 1], [3, 4], [5, 7], [2, 6], [8, 9]]
    assert log.heights.tolist() == [3, 4, 6, 7, 8]
    assert log.sizes.tolist() == [2, 2, 3, 3, 6]


def test_matches_naive_engine(rng):
    for _ in range(60):
        n = int(rng.integers(2, 51))
        order = random_order(rng, n)
        log = hcc_triangle(order)
        naive = oracle.naive_hcc(n, order.pairs)
        assert log.steps.tolist() == [t for t, _, _ in naive]
        sets = log.leaf_sets()
        for (a, b), (_, ca, cb) in zip(log.children, naive):
            assert {frozenset(sets[a].tolist()), frozenset(sets[b].tolist())} == {ca, cb}


def test_always_n_minus_one_merges(rng):
    for n in (1, 2, 3, 10, 40):
        log = hcc_triangle(random_order(rng, n))
        assert len(log) == max(n - 1, 0)
        if n > 1:
            assert log.sizes[-1] == n


def test_merge_log_invariants(rng):
    log = hcc_triangle(EdgeOrdering.from_distances(random_metric(rng, 30)))
    n = log.n
    seen = set()
    size = [1] * n
    for r, (a, b) in enumerate(log.children):
        assert a < b < n + r and a not in seen and b not in seen
        seen |= {a, b}
        size.append(size[a] + size[b])
        assert log.sizes[r] == size[-1]
    assert np.all(np.diff(log.heights) >= 0)


def test_members_see_half_of_their_cluster(rng):
    # every member of a cluster sees at least half of it
    for _ in range(20):
        n = int(rng.integers(3, 31))
        order = random_order(rng, n)
        log = hcc_triangle(order)
        A = np.zeros((n, n), dtype=bool)
        t_merges = log.steps.tolist()
        for t, (x, y) in enumerate(order.pairs.tolist(), 1):
            A[x, y] = A[y, x] = True
            if t in t_merges or t == len(order.pairs):
                view = partition_at(log, t)
                for block in view.blocks:
                    if len(block) < 2:
                        continue
                    idx = sorted(block)
                    inside = A[np.ix_(idx, idx)].sum(axis=1)
                    assert np.all(2 * inside >= len(idx))


def test_determinism(rng):
    order = random_order(rng, 40)
    a, b = hcc_triangle(order), hcc_triangle(order)
    assert np.array_equal(a.children, b.children) and np.array_equal(a.steps, b.steps)


def test_partition_at(rng):
    log = hcc_triangle(EdgeOrdering.from_distances(SIX_D))
    assert len(partition_at(log, 0).blocks) == 6
    order = EdgeOrdering.from_distances(SIX_D)
    t_bc = 1 + next(i for i, p in enumerate(order.pairs.tolist()) if p == [1, 2])
    blocks = set(partition_at(log, t_bc).blocks)
    assert frozenset({0, 1, 2}) in blocks and frozenset({3, 4, 5}) in blocks
    with pytest.raises(ValueError):
        partition_at(log, 16)


def test_partition_monotone(rng):
    n = 15
    log = hcc_triangle(random_order(rng, n))
    prev = partition_at(log, 0)
    for t in range(1, n * (n - 1) // 2 + 1):
        cur = partition_at(log, t)
        for u in range(n):
            for v in range(n):
                if prev.together(u, v):
                    assert cur.together(u, v)
        prev = cur


def test_merge_log_csv_round_trip(tmp_path, rng):
    log = hcc_triangle(EdgeOrdering.from_distances(random_metric(rng, 12)))
    log.to_csv(tmp_path / "log.csv")
    back = MergeLog.from_csv(tmp_path / "log.csv")
    assert np.array_equal(back.children, log.children)
    assert np.array_equal(back.heights, log.heights)
    assert np.array_equal(back.steps, log.steps)
    assert np.array_equal(MergeLog.from_linkage(log.to_linkage()).children, log.children)


def test_cophenetic_matches_partition_replay(rng):
    n = 12
    d = random_metric(rng, n)
    order = EdgeOrdering.from_distances(d)
    log = hcc_triangle(order)
    coph = log.cophenetic()
    for t in range(1, len(order.pairs) + 1):
        view = partition_at(log, t)
        for u in range(n):
            for v in range(u + 1, n):
                if view.together(u, v) and not partition_at(log, t - 1).together(u, v):
                    assert coph[u, v] == order.weights[t - 1]


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_disagreement_bound_property(n, seed):
    rng = np.random.default_rng(seed)
    order = random_order(rng, n)
    log = hcc_triangle(order)
    A = np.zeros((n, n), dtype=bool)
    for t, (x, y) in enumerate(order.pairs.tolist(), 1):
        A[x, y] = A[y, x] = True
        labels = partition_at(log, t).labels
        assert oracle.disagreements(A, labels) <= 4 * oracle.bad_triangle_count(A)
