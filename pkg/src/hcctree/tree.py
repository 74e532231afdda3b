"""Weighted trees realizing fitted tree metrics."""

from __future__ import annotations

from dataclasses import dataclass
from os import PathLike

import numpy as np
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform

from .hcc import MergeLog

_TOL = 1e-9


@dataclass
class WeightedTree:
    """Tree on nodes ``0 .. n_nodes-1``; nodes below ``n_points`` are input points.

    Nodes ``n_points`` and above are Steiner nodes. ``root`` is the base point
    of rooted fits, or ``None``.
    """

    n_points: int
    n_nodes: int
    edges: np.ndarray  # (n_nodes - 1, 2) int
    weights: np.ndarray  # (n_nodes - 1,) float, nonnegative
    root: int | None = None

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.intp).reshape(-1, 2)
        self.weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if len(self.edges) != len(self.weights):
            raise ValueError("edges and weights differ in length")
        if self.n_nodes and len(self.edges) != self.n_nodes - 1:
            raise ValueError(
                f"a tree on {self.n_nodes} nodes needs {self.n_nodes - 1} edges, "
                f"got {len(self.edges)}"
            )
        if len(self.edges) and (self.edges.min() < 0 or self.edges.max() >= self.n_nodes):
            raise ValueError("edge endpoint out of range")

    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n_nodes)]
        for (u, v), w in zip(self.edges.tolist(), self.weights.tolist()):
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    def to_text(self) -> str:
        lines = [f"# n {self.n_points}"]
        if self.root is not None:
            lines.append(f"# root {self.root}")
        lines += [f"{u} {v} {w!r}" for (u, v), w in zip(self.edges.tolist(), self.weights.tolist())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "WeightedTree":
        n_points = None
        root = None
        edges, weights = [], []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(" ")
                if key == "n":
                    n_points = int(value)
                elif key == "root":
                    root = int(value)
                continue
            u, v, w = line.split()
            edges.append((int(u), int(v)))
            weights.append(float(w))
        if n_points is None:
            raise ValueError("missing '# n <count>' header")
        n_nodes = max((max(e) for e in edges), default=n_points - 1) + 1
        n_nodes = max(n_nodes, n_points)
        return cls(n_points, n_nodes, np.array(edges).reshape(-1, 2), weights, root)

    def save(self, path: str | PathLike) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path: str | PathLike) -> "WeightedTree":
        with open(path) as fh:
            return cls.from_text(fh.read())


def tree_path_metric(tree: WeightedTree) -> np.ndarray:
    """Path lengths between the input points of ``tree``.

    The tree is hung from node 0 and processed bottom-up: at every node the
    points collected from different child subtrees (and the node itself)
    meet for the first time, so each pair is written once, O(n^2) overall.
    """
    n, N = tree.n_points, tree.n_nodes
    if N == 0:
        return np.zeros((0, 0))
    adj = tree.adjacency()
    parent = [-1] * N
    up = [0.0] * N
    order = [0]
    seen = [False] * N
    seen[0] = True
    for u in order:
        for v, w in adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                up[v] = w
                order.append(v)
    if len(order) != N:
        raise ValueError("tree is disconnected")

    out = np.zeros((n, n))
    # per node: (point ids below, their distance to the node)
    below: list = [None] * N
    for u in reversed(order):
        groups = []
        if u < n:
            groups.append((np.array([u]), np.zeros(1)))
        for v, _ in adj[u]:
            if parent[v] == u:
                ids, dist = below[v]
                groups.append((ids, dist + up[v]))
                below[v] = None
        for g in range(1, len(groups)):
            ids_g, dist_g = groups[g]
            for h in range(g):
                ids_h, dist_h = groups[h]
                block = dist_g[:, None] + dist_h[None, :]
                out[np.ix_(ids_g, ids_h)] = block
                out[np.ix_(ids_h, ids_g)] = block.T
        if groups:
            below[u] = (
                np.concatenate([g[0] for g in groups]),
                np.concatenate([g[1] for g in groups]),
            )
        else:
            below[u] = (np.empty(0, dtype=np.intp), np.empty(0))
    return out


def ultrametric_linkage(dU) -> MergeLog:
    """Dendrogram of an ultrametric matrix.

    Single linkage reproduces an ultrametric exactly, so its merge heights
    are the ultrametric's values.
    """
    dU = np.asarray(dU, dtype=np.float64)
    n = dU.shape[0]
    if n < 2:
        return MergeLog(n, np.empty((0, 2)), [], [])
    Z = linkage(squareform(dU, checks=False), method="single")
    return MergeLog.from_linkage(Z)


def construct_rooted_tree(log: MergeLog, root: int, root_dist) -> WeightedTree:
    """Realize ``d_U - c_w`` as a tree from the dendrogram of ``d_U``.

    Parameters
    ----------
    log : MergeLog
        Dendrogram of the (reduced) ultrametric ``d_U``, whose heights must lie
        in ``[max(beta_x, beta_y), 2M]`` for the pairs they join.
    root : int
        Base point ``w``.
    root_dist : array_like
        ``d(w, x)`` for every point ``x``.

    A merge at height ``h`` becomes a Steiner node at distance ``M - h/2``
    from the root, joined to its two children. The top node sits at the
    root and is collapsed into it.
    """
    n = log.n
    level = np.asarray(root_dist, dtype=np.float64)
    if n == 1:
        return WeightedTree(1, 1, np.empty((0, 2)), [], root)
    m = float(level.max())
    levels = np.concatenate([level, m - log.heights / 2])
    edges = []
    weights = []
    for t, (a, b) in enumerate(log.children):
        node = n + t
        for child in (a, b):
            w = levels[child] - levels[node]
            if w < -_TOL * max(1.0, m):
                raise ValueError(
                    f"negative edge weight {w:g} between {child} and {node}: "
                    "merge heights are inconsistent with the root distances"
                )
            edges.append((child, node))
            weights.append(max(w, 0.0))
    edges = np.array(edges, dtype=np.intp)
    weights = np.array(weights)

    top = 2 * n - 2
    root_edge = np.flatnonzero(edges[:, 0] == root)
    if abs(levels[top]) <= _TOL * max(1.0, m) and weights[root_edge[0]] <= _TOL * max(1.0, m):
        # the root hangs off a level-0 node through a zero-length edge:
        # drop that edge and let the root take the top node's place
        keep = np.ones(len(edges), dtype=bool)
        keep[root_edge[0]] = False
        edges, weights = edges[keep], weights[keep]
        edges[edges == top] = root
        return WeightedTree(n, 2 * n - 2, edges, weights, root)
    return WeightedTree(n, 2 * n - 1, edges, weights, root)
