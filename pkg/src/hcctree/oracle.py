"""Brute-force verifiers.

Everything here is computed from first principles (literal permutation
definitions, from-scratch recounts, exhaustive sweeps) and deliberately
imports nothing from the fast paths except the engine under test in
:func:`exhaustive_hcc_bound_check`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from itertools import combinations, permutations
from os import PathLike

import numpy as np

_TOL = 1e-9


@dataclass
class VerificationReport:
    """Outcome of one property check; a failure carries a witness."""

    property: str
    instance: str
    passed: bool
    witness: dict | None = None
    checked: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("a failed report needs a witness")

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, default=_jsonable)


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x))


def write_reports(path: str | PathLike, reports) -> None:
    """Append reports as JSON lines."""
    with open(path, "a") as fh:
        for r in reports:
            fh.write(r.to_json() + "\n")


# ---------------------------------------------------------------------------
# defects by enumeration


def _gp(d, w, x, y):
    return (d[x, w] + d[y, w] - d[x, y]) / 2


def fp_by_enumeration(d, x: int, y: int, z: int, w: int) -> float:
    """Four-point defect as the maximum over all 24 relabelings."""
    d = np.asarray(d, dtype=np.float64)
    best = -math.inf
    for a, b, c, base in permutations((x, y, z, w)):
        v = min(_gp(d, base, a, c), _gp(d, base, b, c)) - _gp(d, base, a, b)
        best = max(best, v)
    return float(best)


def tp_by_enumeration(d, x: int, y: int, z: int) -> float:
    """Three-point defect as the maximum over all 6 relabelings."""
    d = np.asarray(d, dtype=np.float64)
    return float(
        max(d[a, c] - max(d[a, b], d[b, c]) for a, b, c in permutations((x, y, z)))
    )


def fp_tp_by_enumeration(d, points) -> float:
    """Dispatch on tuple length: 3 points give tp, 4 give fp."""
    points = tuple(int(p) for p in points)
    if len(set(points)) != len(points):
        raise ValueError("points must be distinct")
    if len(points) == 3:
        return tp_by_enumeration(d, *points)
    if len(points) == 4:
        return fp_by_enumeration(d, *points)
    raise ValueError("need 3 or 4 points")


def _tuples(n: int, r: int) -> np.ndarray:
    return np.array(list(combinations(range(n), r)), dtype=np.intp).reshape(-1, r)


def _tp_all(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # literal definition, vectorized over triples rather than over permutations
    t = _tuples(d.shape[0], 3)
    best = np.full(len(t), -np.inf)
    for pa, pb, pc in permutations(range(3)):
        a, b, c = t[:, pa], t[:, pb], t[:, pc]
        best = np.maximum(best, d[a, c] - np.maximum(d[a, b], d[b, c]))
    return t, best


def _fp_all(d: np.ndarray, base: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    n = d.shape[0]
    if base is None:
        q = _tuples(n, 4)
        cols = [q[:, i] for i in range(4)]
    else:
        rest = np.array([i for i in range(n) if i != base], dtype=np.intp)
        t = rest[_tuples(n - 1, 3)] if n >= 4 else np.empty((0, 3), dtype=np.intp)
        q = t
        cols = [t[:, 0], t[:, 1], t[:, 2], np.full(len(t), base, dtype=np.intp)]
    best = np.full(len(q), -np.inf)
    for pa, pb, pc, pw in permutations(range(4)):
        a, b, c, w = cols[pa], cols[pb], cols[pc], cols[pw]
        v = np.minimum(_gp(d, w, a, c), _gp(d, w, b, c)) - _gp(d, w, a, b)
        best = np.maximum(best, v)
    return q, best


def ultrametricity_l1(d) -> float:
    """``sum`` of three-point defects over all triples."""
    d = np.asarray(d, dtype=np.float64)
    if d.shape[0] < 3:
        return 0.0
    return float(math.fsum(_tp_all(d)[1].tolist()))


def hyperbolicity_l1(d, w: int) -> float:
    """``sum`` of four-point defects over triples not containing ``w``."""
    d = np.asarray(d, dtype=np.float64)
    if d.shape[0] < 4:
        return 0.0
    return float(math.fsum(_fp_all(d, w)[1].tolist()))


def hyperbolicity_max(d, w: int) -> float:
    d = np.asarray(d, dtype=np.float64)
    if d.shape[0] < 4:
        return 0.0
    return float(_fp_all(d, w)[1].max())


def ultrametricity_max(d) -> float:
    d = np.asarray(d, dtype=np.float64)
    if d.shape[0] < 3:
        return 0.0
    return float(_tp_all(d)[1].max())


def avg_hyp_1(d) -> float:
    """Mean four-point defect over all quadruples."""
    d = np.asarray(d, dtype=np.float64)
    if d.shape[0] < 4:
        return 0.0
    vals = _fp_all(d)[1]
    return float(math.fsum(vals.tolist()) / len(vals))


# ---------------------------------------------------------------------------
# metric predicates


def _scale(d) -> float:
    return max(1.0, float(np.max(np.abs(d)))) if d.size else 1.0


def verify_ultrametric(d, tol: float = _TOL, instance: str = "") -> VerificationReport:
    """Strong triangle inequality on every triple, within ``tol`` (relative)."""
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    if n < 3:
        return VerificationReport("ultrametric", instance, True, checked=0)
    t, tp = _tp_all(d)
    k = int(np.argmax(tp))
    if tp[k] > tol * _scale(d):
        x, y, z = (int(i) for i in t[k])
        return VerificationReport(
            "ultrametric", instance, False,
            witness={"triple": [x, y, z], "defect": float(tp[k]),
                     "d": [float(d[x, y]), float(d[x, z]), float(d[y, z])]},
            checked=len(t),
        )
    return VerificationReport("ultrametric", instance, True, checked=len(t))


def verify_tree_metric(d, tol: float = _TOL, instance: str = "") -> VerificationReport:
    """Metric axioms plus a zero four-point defect on every quadruple."""
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    eps = tol * _scale(d)
    if n and (np.any(np.abs(d - d.T) > eps) or np.any(np.abs(np.diag(d)) > eps) or d.min() < -eps):
        return VerificationReport("tree_metric", instance, False, witness={"reason": "not a distance matrix"})
    for x in range(n):
        viol = d[x][:, None] + d[x][None, :] - d  # d(y,x) + d(x,z) - d(y,z)
        if viol.min() < -eps:
            y, z = np.unravel_index(int(np.argmin(viol)), viol.shape)
            return VerificationReport(
                "tree_metric", instance, False,
                witness={"reason": "triangle inequality", "triple": [int(y), x, int(z)]},
            )
    if n < 4:
        return VerificationReport("tree_metric", instance, True, checked=0)
    q, fp = _fp_all(d)
    k = int(np.argmax(fp))
    if fp[k] > eps:
        return VerificationReport(
            "tree_metric", instance, False,
            witness={"quadruple": [int(i) for i in q[k]], "defect": float(fp[k])},
            checked=len(q),
        )
    return VerificationReport("tree_metric", instance, True, checked=len(q))


# ---------------------------------------------------------------------------
# clustering recounts


def highly_connected_recount(X, Y, A) -> bool:
    """From-scratch degree count on an adjacency matrix."""
    X, Y = list(X), list(Y)
    for x in X:
        if 2 * sum(bool(A[x][y]) for y in Y) < len(Y):
            return False
    for y in Y:
        if 2 * sum(bool(A[x][y]) for x in X) < len(X):
            return False
    return True


def naive_hcc(n: int, pairs) -> list[tuple[int, frozenset, frozenset]]:
    """The clustering with every merge decision recounted from scratch.

    Returns ``(step, cluster_a, cluster_b)`` per merge, steps 1-based.
    """
    A = [[False] * n for _ in range(n)]
    cluster = {v: frozenset([v]) for v in range(n)}
    merges = []
    for t, (x, y) in enumerate(pairs, 1):
        x, y = int(x), int(y)
        A[x][y] = A[y][x] = True
        cx, cy = cluster[x], cluster[y]
        if cx == cy:
            continue
        if highly_connected_recount(cx, cy, A):
            merged = cx | cy
            for v in merged:
                cluster[v] = merged
            merges.append((t, cx, cy))
    return merges


def disagreements(A: np.ndarray, labels: np.ndarray) -> int:
    """Pairs that are edges across clusters or non-edges inside a cluster."""
    n = len(labels)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if bool(A[i, j]) != bool(labels[i] == labels[j]):
                count += 1
    return count


def bad_triangle_count(A: np.ndarray) -> int:
    """Triples spanning exactly two edges, by enumeration."""
    n = A.shape[0]
    return sum(
        1
        for i, j, k in combinations(range(n), 3)
        if int(A[i, j]) + int(A[i, k]) + int(A[j, k]) == 2
    )


def _graphs_up_to(max_n: int):
    import networkx as nx

    for g in nx.graph_atlas_g():
        if g.number_of_nodes() > max_n:
            break
        if g.number_of_nodes() >= 2:
            yield g


def exhaustive_hcc_bound_check(
    max_n: int = 6, orders: int = 100, seed: int = 0
) -> VerificationReport:
    """Check ``|E_t xor E(P_t)| <= 4 |B(G_t)|`` at every step.

    Every graph on ``2 .. max_n`` vertices (up to isomorphism) is visited;
    for each, ``orders`` random full orderings list the graph's edges first
    (in random order) and the remaining pairs after, so that the graph
    itself appears as a prefix. Disagreements and bad triangles are
    recounted from scratch at every step.
    """
    from .hcc import EdgeOrdering, hcc_triangle

    rng = np.random.default_rng(seed)
    checked = 0
    graphs = 0
    for g in _graphs_up_to(max_n):
        graphs += 1
        n = g.number_of_nodes()
        edges = [tuple(sorted(e)) for e in g.edges()]
        others = [p for p in combinations(range(n), 2) if p not in set(edges)]
        tri = _tuples(n, 3)
        for _ in range(orders):
            first = [edges[i] for i in rng.permutation(len(edges))]
            rest = [others[i] for i in rng.permutation(len(others))]
            pairs = np.array(first + rest, dtype=np.intp).reshape(-1, 2)
            log = hcc_triangle(EdgeOrdering(n, pairs))
            labels = np.arange(n)
            members = {v: [v] for v in range(n)}
            merge_at = {int(s): (int(a), int(b)) for s, (a, b) in zip(log.steps, log.children)}
            A = np.zeros((n, n), dtype=bool)
            next_id = n
            for t, (x, y) in enumerate(pairs.tolist(), 1):
                A[x, y] = A[y, x] = True
                if t in merge_at:
                    a, b = merge_at[t]
                    members[next_id] = members.pop(a) + members.pop(b)
                    labels[members[next_id]] = next_id
                    next_id += 1
                same = labels[:, None] == labels[None, :]
                dis = int(np.triu(A != same, 1).sum())
                cnt = A[tri[:, 0], tri[:, 1]].astype(int) + A[tri[:, 0], tri[:, 2]] + A[tri[:, 1], tri[:, 2]]
                bad = int((cnt == 2).sum())
                checked += 1
                if dis > 4 * bad:
                    return VerificationReport(
                        "hcc_bound", f"graphs<= {max_n}", False,
                        witness={"n": n, "pairs": pairs.tolist(), "step": t,
                                 "disagreements": dis, "bad_triangles": bad},
                        checked=checked,
                    )
    return VerificationReport(
        "hcc_bound", f"graphs<={max_n}, {orders} orders each", True,
        checked=checked, extra={"graphs": graphs},
    )


# ---------------------------------------------------------------------------
# tightness instance


def tightness_certificate(n: int) -> tuple[np.ndarray, float]:
    """Instance with ``d(0,1) = d(0,2) = 1`` and every other pair at 2.

    Only the triple ``(0, 1, 2)`` is not ultrametric, with defect 1. On it
    any ultrametric has two equal largest values among the three pairs, so
    its three errors sum to at least 1. Returns the matrix and that lower
    bound on the l1 error of every ultrametric fit.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    d = np.full((n, n), 2.0)
    np.fill_diagonal(d, 0.0)
    d[0, 1] = d[1, 0] = d[0, 2] = d[2, 0] = 1.0
    return d, 1.0


def tightness_triple_error(d_U) -> float:
    """l1 error of ``d_U`` on the non-ultrametric triple of the tightness instance."""
    d_U = np.asarray(d_U, dtype=np.float64)
    return abs(d_U[0, 1] - 1) + abs(d_U[0, 2] - 1) + abs(d_U[1, 2] - 2)


# ---------------------------------------------------------------------------
# path oracles


def minimax_paths(d) -> np.ndarray:
    """Bottleneck (minimax) path distances by a Floyd-Warshall sweep."""
    u = np.array(d, dtype=np.float64)
    for k in range(u.shape[0]):
        u = np.minimum(u, np.maximum(u[:, k:k + 1], u[k:k + 1, :]))
    return u


def floyd_warshall(n: int, edges) -> np.ndarray:
    """All-pairs shortest paths by cubic relaxation; ``edges`` holds ``(u, v, w)``."""
    D = np.full((n, n), np.inf)
    np.fill_diagonal(D, 0.0)
    for a, b, w in edges:
        D[a, b] = min(D[a, b], w)
        D[b, a] = min(D[b, a], w)
    for k in range(n):
        D = np.minimum(D, D[:, k:k + 1] + D[k:k + 1, :])
    return D


def tree_distances_by_search(n_points: int, n_nodes: int, edges, weights) -> np.ndarray:
    """Point-to-point path lengths by one depth-first search per point."""
    adj = [[] for _ in range(n_nodes)]
    for (a, b), w in zip(edges, weights):
        adj[int(a)].append((int(b), float(w)))
        adj[int(b)].append((int(a), float(w)))
    out = np.zeros((n_points, n_points))
    for s in range(n_points):
        dist = {s: 0.0}
        stack = [s]
        while stack:
            u = stack.pop()
            for v, w in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + w
                    stack.append(v)
        if len(dist) != n_nodes:
            raise ValueError("tree is disconnected")
        out[s] = [dist[t] for t in range(n_points)]
    return out
