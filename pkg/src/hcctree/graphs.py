"""Graph input, shortest paths and synthetic tree-like metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

MAX_TREE_NODES = 10**7
MAX_ATTEMPTS = 10**6


@dataclass
class Graph:
    """Undirected simple graph on ``0 .. n-1`` with positive edge weights."""

    n: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    labels: list = field(default_factory=list)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.intp).reshape(-1)
        self.v = np.asarray(self.v, dtype=np.intp).reshape(-1)
        self.w = np.asarray(self.w, dtype=np.float64).reshape(-1)
        if not (len(self.u) == len(self.v) == len(self.w)):
            raise ValueError("edge arrays differ in length")
        if len(self.u):
            if min(self.u.min(), self.v.min()) < 0 or max(self.u.max(), self.v.max()) >= self.n:
                raise ValueError("edge endpoint out of range")
            if np.any(self.u == self.v):
                raise ValueError("self-loops are not allowed")
            if np.any(self.w <= 0):
                raise ValueError("edge weights must be positive")
            lo = np.minimum(self.u, self.v)
            hi = np.maximum(self.u, self.v)
            if len(np.unique(lo * self.n + hi)) != len(lo):
                raise ValueError("duplicate edge")
        if not self.labels:
            self.labels = list(range(self.n))

    @property
    def n_edges(self) -> int:
        return len(self.u)

    @property
    def unweighted(self) -> bool:
        return bool(np.all(self.w == 1.0))

    def sparse(self):
        rows = np.concatenate([self.u, self.v])
        cols = np.concatenate([self.v, self.u])
        return coo_matrix((np.concatenate([self.w, self.w]), (rows, cols)), shape=(self.n, self.n)).tocsr()

    def edge_set(self) -> set[tuple[int, int]]:
        return {(min(a, b), max(a, b)) for a, b in zip(self.u.tolist(), self.v.tolist())}

    def to_text(self) -> str:
        out = []
        for a, b, w in zip(self.u.tolist(), self.v.tolist(), self.w.tolist()):
            out.append(f"{a} {b}" if w == 1.0 else f"{a} {b} {w!r}")
        return "\n".join(out) + ("\n" if out else "")


def parse_edge_list(text: str) -> Graph:
    """Parse ``u v [w]`` lines; labels are relabeled densely in first-appearance order.

    Blank lines and lines starting with ``#`` are ignored. Missing weights
    default to 1.
    """
    index: dict[str, int] = {}
    us, vs, ws = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"line {lineno}: expected 'u v [w]', got {raw!r}")
        a, b = parts[0], parts[1]
        if a == b:
            raise ValueError(f"line {lineno}: self-loop on {a!r}")
        try:
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise ValueError(f"line {lineno}: bad weight {parts[2]!r}") from None
        if not w > 0:
            raise ValueError(f"line {lineno}: weight must be positive")
        for lab in (a, b):
            if lab not in index:
                index[lab] = len(index)
        us.append(index[a])
        vs.append(index[b])
        ws.append(w)
    labels = list(index)
    return Graph(len(labels), us, vs, ws, labels)


def largest_component(g: Graph) -> Graph:
    """Induced subgraph on the largest connected component, relabeled densely.

    Ties go to the component holding the smallest vertex index.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    _, comp = connected_components(g.sparse(), directed=False)
    sizes = np.bincount(comp)
    # components are numbered by their smallest vertex, so argmax picks it on ties
    keep = comp == int(np.argmax(sizes))
    new = np.full(g.n, -1)
    new[keep] = np.arange(int(keep.sum()))
    e = keep[g.u] & keep[g.v]
    labels = [lab for lab, k in zip(g.labels, keep) if k]
    return Graph(int(keep.sum()), new[g.u[e]], new[g.v[e]], g.w[e], labels)


def shortest_path_matrix(g: Graph) -> np.ndarray:
    """All-pairs shortest paths: BFS for unit weights, Dijkstra otherwise."""
    if g.n == 0:
        return np.zeros((0, 0))
    if g.unweighted:
        d = shortest_path(g.sparse(), method="D", directed=False, unweighted=True)
    else:
        d = shortest_path(g.sparse(), method="D", directed=False)
    if not np.all(np.isfinite(d)):
        raise ValueError("graph is disconnected")
    return d


def balanced_tree(r: int, h: int) -> Graph:
    """Complete ``r``-ary tree of height ``h`` with unit edges; node 0 is the apex."""
    if r < 2 or h < 1:
        raise ValueError("need r >= 2 and h >= 1")
    n = (r ** (h + 1) - 1) // (r - 1)
    if n > MAX_TREE_NODES:
        raise ValueError(f"BT({r},{h}) has {n} nodes, above {MAX_TREE_NODES}")
    child = np.arange(1, n)
    return Graph(n, (child - 1) // r, child, np.ones(n - 1))


@dataclass
class SyntheticSpec:
    """Perturbation of a base tree by ``n_e`` shortcut edges."""

    n_e: int = 500
    delta: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n_e < 0:
            raise ValueError("n_e must be nonnegative")
        if not self.delta > 0:
            raise ValueError("delta must be positive")


def perturb_tree(tree: Graph, spec: SyntheticSpec) -> Graph:
    """Add ``spec.n_e`` shortcut edges to ``tree``.

    Each round draws two distinct vertices uniformly; pairs at tree distance
    ``<= 2`` or already joined are redrawn, otherwise the edge ``(v, w)`` is
    added with weight ``d_T(v, w) - 2 delta``. Distances are always taken in
    the original tree.
    """
    if tree.n_edges != tree.n - 1:
        raise ValueError("input is not a tree")
    if spec.n_e == 0:
        return Graph(tree.n, tree.u, tree.v, tree.w, list(tree.labels))
    d_T = shortest_path_matrix(tree)
    if d_T.max() <= 2:
        raise ValueError("tree has no pair at distance > 2")
    rng = np.random.default_rng(spec.seed)
    present = tree.edge_set()
    us, vs, ws = tree.u.tolist(), tree.v.tolist(), tree.w.tolist()
    for _ in range(spec.n_e):
        for _ in range(MAX_ATTEMPTS):
            a, b = rng.choice(tree.n, size=2, replace=False).tolist()
            key = (min(a, b), max(a, b))
            if d_T[a, b] > 2 and key not in present:
                break
        else:
            raise RuntimeError(f"no eligible pair found in {MAX_ATTEMPTS} draws")
        present.add(key)
        us.append(a)
        vs.append(b)
        ws.append(d_T[a, b] - 2 * spec.delta)
    return Graph(tree.n, us, vs, ws, list(tree.labels))


def synthetic_metric(r: int, h: int, spec: SyntheticSpec) -> np.ndarray:
    """Shortest-path metric of a perturbed ``BT(r, h)``."""
    return shortest_path_matrix(perturb_tree(balanced_tree(r, h), spec))
