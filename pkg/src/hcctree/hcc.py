"""Hierarchical correlation clustering with triangle objectives.

Pairs are inserted one at a time; two clusters are merged when the edge
just inserted joins them and they are *highly connected* (every vertex on
either side is adjacent to at least half of the other side). The engine
keeps, for every vertex ``x`` and live cluster ``C``:

* ``D[C][x]``: neighbours of ``x`` inside ``C``,
* ``M[A][B]``: vertices of ``A`` adjacent to at least half of ``B``,

so a non-merging step costs O(1) and a merge O(n), O(n^2) overall.
"""

from __future__ import annotations

import csv
from array import array
from dataclasses import dataclass, field
from itertools import count
from os import PathLike

import numpy as np


@dataclass
class EdgeOrdering:
    """A permutation of all ``C(n, 2)`` vertex pairs, optionally weighted.

    ``pairs`` has shape ``(C(n, 2), 2)``; ``weights``, when present, must be
    nondecreasing along the ordering.
    """

    n: int
    pairs: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        n = int(self.n)
        if n < 0:
            raise ValueError("n must be nonnegative")
        pairs = np.asarray(self.pairs, dtype=np.intp).reshape(-1, 2)
        k = n * (n - 1) // 2
        if len(pairs) != k:
            raise ValueError(f"expected {k} pairs for n={n}, got {len(pairs)}")
        if k:
            lo = pairs.min(axis=1)
            hi = pairs.max(axis=1)
            if lo.min() < 0 or hi.max() >= n:
                raise ValueError("pair index out of range")
            if np.any(lo == hi):
                raise ValueError("ordering contains a self-pair")
            code = np.unique(lo * n + hi)
            if len(code) != k:
                raise ValueError("ordering repeats a pair")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=np.float64)
            if w.shape != (k,):
                raise ValueError("weights must have one entry per pair")
            if np.any(np.diff(w) < 0):
                raise ValueError("weights must be nondecreasing")
            self.weights = w
        self.n = n
        self.pairs = pairs

    @classmethod
    def from_distances(cls, d) -> "EdgeOrdering":
        """Pairs sorted by distance, ties broken lexicographically by ``(i, j)``."""
        d = np.asarray(d, dtype=np.float64)
        n = d.shape[0]
        iu, ju = np.triu_indices(n, 1)
        w = d[iu, ju]
        # triu order is already lexicographic, so a stable sort keeps ties in (i, j) order
        order = np.argsort(w, kind="stable")
        return cls(n, np.column_stack([iu[order], ju[order]]), w[order])


@dataclass
class MergeLog:
    """Agglomerative merge sequence in the 4-column linkage convention.

    Row ``r`` merges clusters ``children[r, 0] < children[r, 1]`` into a new
    cluster with id ``n + r``. Leaves have ids ``0 .. n-1``. ``steps[r]`` is
    the 1-based position in the edge ordering at which the merge happened
    (``None`` for logs not produced by an ordering).
    """

    n: int
    children: np.ndarray
    heights: np.ndarray
    sizes: np.ndarray
    steps: np.ndarray | None = None

    def __post_init__(self):
        self.children = np.asarray(self.children, dtype=np.intp).reshape(-1, 2)
        self.heights = np.asarray(self.heights, dtype=np.float64)
        self.sizes = np.asarray(self.sizes, dtype=np.intp)
        if self.steps is not None:
            self.steps = np.asarray(self.steps, dtype=np.intp)

    def __len__(self) -> int:
        return len(self.children)

    def to_linkage(self) -> np.ndarray:
        """scipy-style ``(n-1, 4)`` linkage matrix."""
        return np.column_stack(
            [self.children.astype(np.float64), self.heights, self.sizes.astype(np.float64)]
        )

    @classmethod
    def from_linkage(cls, Z, steps=None) -> "MergeLog":
        Z = np.asarray(Z, dtype=np.float64)
        n = len(Z) + 1
        ch = np.sort(Z[:, :2].astype(np.intp), axis=1)
        return cls(n, ch, Z[:, 2].copy(), Z[:, 3].astype(np.intp), steps)

    def leaf_sets(self) -> list[np.ndarray]:
        """Members of every cluster id ``0 .. 2n-2``."""
        sets = [np.array([i], dtype=np.intp) for i in range(self.n)]
        for a, b in self.children:
            sets.append(np.concatenate([sets[a], sets[b]]))
        return sets

    def cophenetic(self) -> np.ndarray:
        """Induced ultrametric: each pair gets the height of its lowest merge.

        Every pair is written exactly once, so this is O(n^2).
        """
        n = self.n
        out = np.zeros((n, n))
        sets = [np.array([i], dtype=np.intp) for i in range(n)]
        for (a, b), h in zip(self.children, self.heights):
            A, B = sets[a], sets[b]
            out[np.ix_(A, B)] = h
            out[np.ix_(B, A)] = h
            sets.append(np.concatenate([A, B]))
        return out

    def to_csv(self, path: str | PathLike) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["id_a", "id_b", "height", "size", "step"])
            steps = self.steps if self.steps is not None else [""] * len(self)
            for (a, b), h, s, t in zip(self.children, self.heights, self.sizes, steps):
                w.writerow([int(a), int(b), repr(float(h)), int(s), t if t == "" else int(t)])

    @classmethod
    def from_csv(cls, path: str | PathLike) -> "MergeLog":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        n = len(rows) + 1
        children = [(int(r["id_a"]), int(r["id_b"])) for r in rows]
        heights = [float(r["height"]) for r in rows]
        sizes = [int(r["size"]) for r in rows]
        steps = None
        if rows and rows[0].get("step", "") != "":
            steps = [int(r["step"]) for r in rows]
        return cls(n, np.array(children).reshape(-1, 2), heights, sizes, steps)


def is_highly_connected(cluster_x, cluster_y, edges) -> bool:
    """Whether every vertex of each cluster sees at least half of the other.

    ``edges`` is a boolean adjacency matrix or a collection of vertex pairs.
    The comparison is real-valued: a vertex needs ``2 * deg >= |other|``.
    """
    X = list(cluster_x)
    Y = list(cluster_y)
    if not X or not Y:
        raise ValueError("clusters must be nonempty")
    if set(X) & set(Y):
        raise ValueError("clusters overlap")
    if isinstance(edges, np.ndarray):
        sub = np.asarray(edges, dtype=bool)[np.ix_(X, Y)]
        return bool(
            np.all(2 * sub.sum(axis=1) >= len(Y)) and np.all(2 * sub.sum(axis=0) >= len(X))
        )
    E = {frozenset(e) for e in edges}
    for x in X:
        if 2 * sum(frozenset((x, y)) in E for y in Y) < len(Y):
            return False
    for y in Y:
        if 2 * sum(frozenset((x, y)) in E for x in X) < len(X):
            return False
    return True


def hcc_triangle(order: EdgeOrdering) -> MergeLog:
    """Run the clustering over ``order`` and return its merge log.

    Merge heights are the pair weights at the merge step, or the step index
    itself for unweighted orderings. Pairs whose endpoints already share a
    cluster leave the state unchanged.
    """
    n = order.n
    # flat int lists: iterating C(n, 2) small lists would burden the GC
    xs = order.pairs[:, 0].tolist()
    ys = order.pairs[:, 1].tolist()
    weights = order.weights.tolist() if order.weights is not None else None

    # clusters live in slots; a merge keeps slot ``a`` and retires slot ``b``.
    # Rows are compact integer arrays (D[C][x], M[A][B]) with numpy views over
    # the same buffers: scalar updates stay cheap, merges become vector adds,
    # and the smaller footprint keeps random access cache friendly.
    label = list(range(n))
    label_arr = np.arange(n)
    members = [[v] for v in range(n)]
    size = [1] * n
    cluster_id = list(range(n))
    live = set(range(n))
    code, dtype = ("h", np.int16) if n <= np.iinfo(np.int16).max else ("i", np.int32)
    zero = array(code, bytes(np.dtype(dtype).itemsize * n))
    D = [array(code, zero) for _ in range(n)]
    M = [array(code, zero) for _ in range(n)]
    Dv = [np.frombuffer(r, dtype=dtype) for r in D]
    Mv = [np.frombuffer(r, dtype=dtype) for r in M]

    children, heights, sizes, steps = [], [], [], []
    next_id = n
    for t, x, y in zip(count(1), xs, ys):
        a = label[x]
        b = label[y]
        if a == b:
            continue
        row = D[b]
        c = row[x] + 1
        row[x] = c
        sb = size[b]
        if 2 * c >= sb > 2 * c - 2:
            M[a][b] += 1
        row = D[a]
        c = row[y] + 1
        row[y] = c
        sa = size[a]
        if 2 * c >= sa > 2 * c - 2:
            M[b][a] += 1
        # M[a][b] <= |a| always, so test it alone first
        if M[a][b] != sa or M[b][a] != sb:
            continue

        # merge b into a
        s = sa + sb
        Da = Dv[a]
        Da += Dv[b]
        Mv[a] += Mv[b]
        D[b] = M[b] = Dv[b] = Mv[b] = None
        for v in members[b]:
            label[v] = a
        label_arr[members[b]] = a
        members[a].extend(members[b])
        members[b] = None
        size[a] = s
        live.discard(b)
        high = np.bincount(label_arr[2 * Da >= s], minlength=n).tolist()
        for k in live:
            M[k][a] = high[k]

        ia, ib = cluster_id[a], cluster_id[b]
        children.append((ia, ib) if ia < ib else (ib, ia))
        heights.append(weights[t - 1] if weights is not None else float(t))
        sizes.append(s)
        steps.append(t)
        cluster_id[a] = next_id
        next_id += 1

    return MergeLog(
        n,
        np.array(children, dtype=np.intp).reshape(-1, 2),
        np.array(heights, dtype=np.float64),
        np.array(sizes, dtype=np.intp),
        np.array(steps, dtype=np.intp),
    )


@dataclass
class PartitionView:
    """Snapshot of the hierarchical partition after ``step`` pair insertions."""

    step: int
    labels: np.ndarray
    _blocks: list[frozenset] = field(default_factory=list, repr=False)

    def cluster_of(self, v: int) -> frozenset:
        return next(b for b in self.blocks if v in b)

    def together(self, u: int, v: int) -> bool:
        return bool(self.labels[u] == self.labels[v])

    @property
    def blocks(self) -> list[frozenset]:
        if not self._blocks:
            groups: dict[int, set] = {}
            for v, lab in enumerate(self.labels.tolist()):
                groups.setdefault(lab, set()).add(v)
            self._blocks = [frozenset(g) for g in groups.values()]
        return self._blocks


def partition_at(log: MergeLog, t: int) -> PartitionView:
    """Partition after the first ``t`` pairs have been processed.

    Each vertex is labelled by the id of its cluster at step ``t``.
    """
    if log.steps is None:
        raise ValueError("merge log carries no step information")
    k = log.n * (log.n - 1) // 2
    if not 0 <= t <= k:
        raise ValueError(f"step {t} outside [0, {k}]")
    labels = np.arange(log.n)
    sets = [np.array([i]) for i in range(log.n)]
    for r, ((a, b), s) in enumerate(zip(log.children, log.steps)):
        if s > t:
            break
        members = np.concatenate([sets[a], sets[b]])
        sets.append(members)
        labels[members] = log.n + r
    return PartitionView(t, labels)

