"""Ultrametric and rooted tree fits built on :func:`hcc_triangle`.

A rooted tree fit with base ``w`` reduces to an ultrametric fit: with
``M = max_x d(x, w)`` and offsets ``c_w(x, y) = 2M - d(x, w) - d(y, w)``,
the matrix ``d + c_w`` equals ``2(M - gp_w)``, any ultrametric ``d_U``
fitted to it lifts back to the tree metric ``d_U - c_w``, and the error is
unchanged entrywise.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import cophenet, linkage
from scipy.spatial.distance import squareform

from .hcc import EdgeOrdering, MergeLog, hcc_triangle
from .metricspace import check_distance_matrix, hyperbolicity_vector, is_metric
from .report import FitReport
from .tree import WeightedTree, construct_rooted_tree, ultrametric_linkage

_TOL = 1e-9


def hcc_ultra_fit(d) -> tuple[np.ndarray, MergeLog]:
    """Fit an ultrametric to ``d``.

    Pairs are inserted by nondecreasing distance (ties in ``(i, j)`` order)
    and each pair gets the distance at which its endpoints first share a
    cluster.

    Returns
    -------
    d_U : ndarray
        The fitted ultrametric.
    log : MergeLog
        Merge sequence whose heights are the distances at the merge steps.
    """
    d = check_distance_matrix(d)
    log = hcc_triangle(EdgeOrdering.from_distances(d))
    return log.cophenetic(), log


@dataclass
class ReductionContext:
    """Offsets that turn rooted tree fitting around ``base`` into ultrametric fitting."""

    base: int
    M: float
    root_dist: np.ndarray  # d(w, x)
    beta: np.ndarray  # 2(M - d(w, x))

    @classmethod
    def from_distances(cls, d, base: int) -> "ReductionContext":
        d = np.asarray(d, dtype=np.float64)
        n = d.shape[0]
        if not 0 <= base < n:
            raise IndexError(f"base point {base} out of range for n={n}")
        row = d[base].copy()
        M = float(row.max()) if n else 0.0
        return cls(base, M, row, 2 * (M - row))

    @property
    def offsets(self) -> np.ndarray:
        """``c_w``; zero on the diagonal."""
        c = (self.beta[:, None] + self.beta[None, :]) / 2
        np.fill_diagonal(c, 0.0)
        return c

    def reduce(self, d) -> np.ndarray:
        """``d + c_w``; the base row comes out as exactly ``2M``."""
        r = self.root_dist
        out = (np.asarray(d, dtype=np.float64) - r[:, None] - r[None, :]) + 2 * self.M
        np.fill_diagonal(out, 0.0)
        return out

    def lift(self, d_U) -> np.ndarray:
        """``d_U - c_w``, evaluated so that a base row of ``2M`` maps to ``d(w, .)`` exactly."""
        r = self.root_dist
        out = (np.asarray(d_U, dtype=np.float64) - 2 * self.M) + r[:, None] + r[None, :]
        np.fill_diagonal(out, 0.0)
        return out

    def lower(self) -> np.ndarray:
        """``max(beta_x, beta_y)`` per pair, zero on the diagonal."""
        lo = np.maximum(self.beta[:, None], self.beta[None, :])
        np.fill_diagonal(lo, 0.0)
        return lo

    def out_of_range(self, d_U, tol: float = _TOL) -> float:
        """Largest amount by which ``d_U`` leaves ``[max(beta_x, beta_y), 2M]``."""
        d_U = np.asarray(d_U, dtype=np.float64)
        n = len(self.beta)
        if n < 2:
            return 0.0
        iu = np.triu_indices(n, 1)
        below = (self.lower()[iu] - d_U[iu]).max()
        above = (d_U[iu] - 2 * self.M).max()
        return max(float(below), float(above), 0.0)


def _is_ultrametric(d_U, tol: float) -> bool:
    # an ultrametric is its own subdominant ultrametric
    n = d_U.shape[0]
    if n < 3:
        return True
    c = cophenet(linkage(squareform(d_U, checks=False), method="single"))
    return bool(np.max(np.abs(c - squareform(d_U, checks=False))) <= tol * max(1.0, d_U.max()))


def restrict_reduced_ultrametric(d_U, ctx: ReductionContext, *, tol: float = _TOL) -> np.ndarray:
    """Clip an ultrametric fitted to ``d + c_w`` into ``[max(beta_x, beta_y), 2M]``.

    The result is still an ultrametric, is no farther from ``d + c_w`` in
    any entry, and lifts to a tree metric that keeps every distance to the
    base point.
    """
    d_U = check_distance_matrix(d_U)
    if d_U.shape[0] != len(ctx.beta):
        raise ValueError("ultrametric and context disagree on the point count")
    if not _is_ultrametric(d_U, tol):
        raise ValueError("input is not an ultrametric")
    out = np.minimum(np.maximum(d_U, ctx.lower()), 2 * ctx.M)
    np.fill_diagonal(out, 0.0)
    return out


def tree_from_reduced_ultrametric(d_U, ctx: ReductionContext) -> WeightedTree:
    """Realize ``d_U - c_w`` for an ultrametric already inside the clipping range."""
    return construct_rooted_tree(ultrametric_linkage(d_U), ctx.base, ctx.root_dist)


def hcc_rooted_tree_fit(d, w: int) -> tuple[WeightedTree, np.ndarray, FitReport]:
    """Tree fit that keeps every distance to ``w``.

    Returns the realizing tree, the fitted tree metric ``d_T`` and a
    :class:`FitReport`. On metric inputs the ultrametric fitted to
    ``d + c_w`` already lies in the clipping range, which is asserted; on
    non-metric inputs it is clipped first.
    """
    d = check_distance_matrix(d)
    start = time.perf_counter()
    ctx = ReductionContext.from_distances(d, w)
    d_U, log = hcc_ultra_fit(ctx.reduce(d))
    excess = ctx.out_of_range(d_U)
    clipped = excess > _TOL * max(1.0, ctx.M)
    if clipped:
        if is_metric(d):
            raise AssertionError(
                f"ultrametric fit leaves the clipping range by {excess:g} on a metric input"
            )
        d_U = restrict_reduced_ultrametric(d_U, ctx)
        tree = tree_from_reduced_ultrametric(d_U, ctx)
    else:
        tree = construct_rooted_tree(log, w, ctx.root_dist)
    d_T = ctx.lift(d_U)
    elapsed = time.perf_counter() - start
    report = FitReport.from_fit("hcc", d, d_T, wall_time_seconds=elapsed, base=w)
    report.bounds["clipped"] = bool(clipped)
    return tree, d_T, report


def best_base_tree_fit(d, strategy: str = "min_error"):
    """Rooted fit over the best base point.

    ``strategy="min_error"`` fits every base and keeps the smallest l1
    error; ``"min_hyp_l1"`` picks the base with the smallest l1 norm of its
    hyperbolicity vector. Ties go to the smallest index.

    Returns ``(tree, d_T, w, report)``.
    """
    d = check_distance_matrix(d)
    n = d.shape[0]
    if n < 2:
        raise ValueError("need at least two points")
    if strategy == "min_hyp_l1":
        norms = [hyperbolicity_vector(d, x).norm(1) for x in range(n)]
        w = int(np.argmin(norms))
        tree, d_T, report = hcc_rooted_tree_fit(d, w)
        report.bounds["hyp_l1"] = float(norms[w])
        return tree, d_T, w, report
    if strategy != "min_error":
        raise ValueError(f"unknown strategy {strategy!r}")
    # errors within rounding noise of each other count as ties
    eps = _TOL * max(1.0, float(d.max())) * n * n
    best = None
    for x in range(n):
        fit = hcc_rooted_tree_fit(d, x)
        if best is None or fit[2].l1_total < best[2].l1_total - eps:
            best = fit
    tree, d_T, report = best
    return tree, d_T, report.base, report
