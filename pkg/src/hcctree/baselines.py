"""Comparison fitters: single linkage, Gromov's tree fit and neighbor joining."""

from __future__ import annotations

import time

import numpy as np
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform

from .fitters import ReductionContext, restrict_reduced_ultrametric, tree_from_reduced_ultrametric
from .hcc import MergeLog
from .metricspace import check_distance_matrix
from .report import FitReport
from .tree import WeightedTree, tree_path_metric

BASELINES = ("gromov", "neighbor_join", "single_linkage")


def single_linkage_ultrametric(d) -> tuple[np.ndarray, MergeLog]:
    """Subdominant ultrametric of ``d`` (minimax path distance) and its dendrogram."""
    d = check_distance_matrix(d)
    n = d.shape[0]
    if n < 2:
        return np.zeros((n, n)), MergeLog(n, np.empty((0, 2)), [], [])
    log = MergeLog.from_linkage(linkage(squareform(d, checks=False), method="single"))
    return log.cophenetic(), log


def gromov_tree_fit(d, w: int) -> tuple[WeightedTree, np.ndarray, FitReport]:
    """Gromov's tree fit around ``w``, computed as single linkage on ``d + c_w``.

    Single linkage never stretches, so its output can fall below
    ``max(beta_x, beta_y)``; the clipping restriction restores the base row.
    """
    d = check_distance_matrix(d)
    start = time.perf_counter()
    ctx = ReductionContext.from_distances(d, w)
    d_U, _ = single_linkage_ultrametric(ctx.reduce(d))
    d_U = restrict_reduced_ultrametric(d_U, ctx)
    tree = tree_from_reduced_ultrametric(d_U, ctx)
    d_T = ctx.lift(d_U)
    elapsed = time.perf_counter() - start
    return tree, d_T, FitReport.from_fit("gromov", d, d_T, wall_time_seconds=elapsed, base=w)


def neighbor_join(d) -> tuple[WeightedTree, np.ndarray, FitReport]:
    """Saitou-Nei neighbor joining, O(n^3).

    Internal nodes get ids ``n, n+1, ...`` in creation order. Among pairs
    minimizing ``Q`` the lexicographically smallest node-id pair is joined.
    Negative branch lengths are kept during agglomeration and set to zero
    once the tree is complete.
    """
    d = check_distance_matrix(d)
    n = d.shape[0]
    start = time.perf_counter()
    edges: list[tuple[int, int]] = []
    weights: list[float] = []
    D = d.copy()
    nodes = list(range(n))  # position -> node id, kept in increasing id order
    next_id = n
    while len(nodes) > 2:
        m = len(nodes)
        S = D.sum(axis=1)
        Q = (m - 2) * D - S[:, None] - S[None, :]
        iu, ju = np.triu_indices(m, 1)
        k = int(np.argmin(Q[iu, ju]))  # first minimum in row-major = lexicographic
        i, j = int(iu[k]), int(ju[k])
        dij = D[i, j]
        di = dij / 2 + (S[i] - S[j]) / (2 * (m - 2))
        edges += [(nodes[i], next_id), (nodes[j], next_id)]
        weights += [di, dij - di]
        du = (D[i] + D[j] - dij) / 2
        keep = [p for p in range(m) if p != i and p != j]
        D = np.block(
            [[D[np.ix_(keep, keep)], du[keep, None]], [du[None, keep], np.zeros((1, 1))]]
        )
        nodes = [nodes[p] for p in keep] + [next_id]
        next_id += 1
    if len(nodes) == 2:
        edges.append((nodes[0], nodes[1]))
        weights.append(D[0, 1])
    w = np.maximum(np.array(weights, dtype=np.float64), 0.0)
    tree = WeightedTree(n, max(next_id, n), np.array(edges, dtype=np.intp).reshape(-1, 2), w)
    d_T = tree_path_metric(tree)
    elapsed = time.perf_counter() - start
    return tree, d_T, FitReport.from_fit("nj", d, d_T, wall_time_seconds=elapsed)
