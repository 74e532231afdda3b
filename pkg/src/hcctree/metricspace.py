"""Distance matrices and the hyperbolicity / ultrametricity statistics.

A distance matrix is a plain square ``numpy`` array of floats with zero
diagonal, symmetric, nonnegative entries. The triangle inequality is not
required (fitting inputs such as ``d + c_w`` may violate it); use
:func:`is_metric` to test it.

Triples and quadruples are always enumerated in lexicographic order of
ascending indices, so vector layouts are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from itertools import combinations
from os import PathLike

import numpy as np

#: Largest number of quadruples swept exhaustively by :func:`hyp_stats`.
EXACT_QUADRUPLE_LIMIT = 10**8

_TOL = 1e-9


def check_distance_matrix(d, *, tol: float = _TOL, copy: bool = True) -> np.ndarray:
    """Validate and return ``d`` as a float64 distance matrix.

    Entries that are asymmetric by at most ``tol`` are averaged, and a
    diagonal within ``tol`` of zero is reset to exactly zero.

    Raises
    ------
    ValueError
        If ``d`` is not square, not finite, asymmetric or has a nonzero
        diagonal beyond ``tol``, or has negative entries.
    """
    arr = np.array(d, dtype=np.float64, copy=copy)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("distance matrix contains non-finite entries")
    if arr.size:
        asym = np.max(np.abs(arr - arr.T))
        if asym > tol:
            raise ValueError(f"distance matrix is not symmetric (max deviation {asym:g})")
        diag = np.max(np.abs(np.diag(arr)))
        if diag > tol:
            raise ValueError(f"distance matrix has nonzero diagonal (max {diag:g})")
        if asym > 0:
            arr = (arr + arr.T) / 2
        np.fill_diagonal(arr, 0.0)
        if np.min(arr) < 0:
            raise ValueError("distance matrix has negative entries")
    return arr


def is_metric(d, tol: float = _TOL) -> bool:
    """Whether ``d`` satisfies the triangle inequality within ``tol``."""
    d = np.asarray(d, dtype=np.float64)
    for k in range(d.shape[0]):
        if np.any(d > d[:, k, None] + d[None, k, :] + tol):
            return False
    return True


def load_distance_csv(path: str | PathLike) -> np.ndarray:
    """Read an ``n x n`` headerless CSV of decimals into a distance matrix."""
    arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return check_distance_matrix(arr, copy=False)


def save_distance_csv(path: str | PathLike, d) -> None:
    np.savetxt(path, np.asarray(d, dtype=np.float64), delimiter=",", fmt="%.17g")


# ---------------------------------------------------------------------------
# pointwise conditions


def _check_index(n: int, *idx: int) -> None:
    for i in idx:
        if not 0 <= i < n:
            raise IndexError(f"point index {i} out of range for n={n}")


def _check_distinct(*idx: int) -> None:
    if len(set(idx)) != len(idx):
        raise ValueError(f"indices must be distinct, got {idx}")


def gromov_product(d, w: int, x: int, y: int) -> float:
    """Gromov product of ``x`` and ``y`` seen from base point ``w``.

    Negative values are possible when ``d`` is not a metric.
    """
    d = np.asarray(d)
    _check_index(d.shape[0], w, x, y)
    return (float(d[x, w]) + float(d[y, w]) - float(d[x, y])) / 2


def three_point(d, x: int, y: int, z: int) -> float:
    """Ultrametric defect of a triple: largest minus second-largest side."""
    d = np.asarray(d)
    _check_index(d.shape[0], x, y, z)
    _check_distinct(x, y, z)
    a, b, c = sorted((float(d[x, y]), float(d[x, z]), float(d[y, z])))
    return c - b


def four_point(d, x: int, y: int, z: int, w: int) -> float:
    """Four-point defect: half the gap between the two largest pair sums."""
    d = np.asarray(d)
    _check_index(d.shape[0], x, y, z, w)
    _check_distinct(x, y, z, w)
    s3, s2, s1 = sorted(
        (
            float(d[x, y]) + float(d[z, w]),
            float(d[x, z]) + float(d[y, w]),
            float(d[x, w]) + float(d[y, z]),
        )
    )
    return (s1 - s2) / 2


def _top_gap(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    # largest minus median, elementwise; median taken without arithmetic so
    # that exactly representable inputs give exact results
    hi = np.maximum(np.maximum(a, b), c)
    mid = np.maximum(np.minimum(a, b), np.minimum(np.maximum(a, b), c))
    return hi - mid


# ---------------------------------------------------------------------------
# vectors


@dataclass(frozen=True)
class HypVector:
    """Per-triple defects; ``base`` is set for hyperbolicity vectors."""

    values: np.ndarray
    base: int | None = None

    def __len__(self) -> int:
        return len(self.values)

    def norm(self, p: float = 1) -> float:
        if len(self.values) == 0:
            return 0.0
        return float(np.linalg.norm(self.values, ord=p))


def _triples(points) -> np.ndarray:
    points = np.asarray(points, dtype=np.intp)
    if len(points) < 3:
        return np.empty((0, 3), dtype=np.intp)
    idx = np.fromiter(
        (i for t in combinations(range(len(points)), 3) for i in t),
        dtype=np.intp,
        count=3 * math.comb(len(points), 3),
    ).reshape(-1, 3)
    return points[idx]


def hyperbolicity_vector(d, w: int) -> HypVector:
    """Four-point defects of ``(x, y, z, w)`` over triples of ``X \\ {w}``.

    The vector has ``C(n-1, 3)`` entries, empty for ``n < 4``.
    """
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    _check_index(n, w)
    rest = np.delete(np.arange(n), w)
    t = _triples(rest)
    x, y, z = t[:, 0], t[:, 1], t[:, 2]
    vals = _top_gap(d[x, y] + d[z, w], d[x, z] + d[y, w], d[y, z] + d[x, w]) / 2
    return HypVector(vals, base=w)


def ultrametricity_vector(d) -> HypVector:
    """Three-point defects over all ``C(n, 3)`` triples."""
    d = np.asarray(d, dtype=np.float64)
    t = _triples(np.arange(d.shape[0]))
    x, y, z = t[:, 0], t[:, 1], t[:, 2]
    return HypVector(_top_gap(d[x, y], d[x, z], d[y, z]))


# ---------------------------------------------------------------------------
# summary statistics


@dataclass
class HypStats:
    """Worst-case and averaged hyperbolicity / ultrametricity of a matrix.

    ``avg_hyp`` and ``avg_um`` are the ``p``-averages; the ``*_1`` fields are
    the plain averages regardless of ``p``. In sampled mode ``hyp`` and
    ``um`` are maxima over the sample (lower bounds) and the half-widths are
    95% normal-approximation intervals on the mean of ``fp**p`` / ``tp**p``.
    """

    n: int
    p: float
    hyp: float
    um: float
    avg_hyp: float
    avg_um: float
    avg_hyp_1: float
    avg_um_1: float
    exact: bool
    sample_count: int | None = None
    seed: int | None = None
    hyp_halfwidth: float | None = None
    um_halfwidth: float | None = None

    @property
    def bound(self) -> float:
        """Guaranteed average distortion of the best-base tree fit."""
        n = self.n
        if n < 2:
            return 0.0
        return 8 * math.comb(n - 1, 3) * self.avg_hyp_1 / math.comb(n, 2)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["bound"] = self.bound
        return out


class _Accumulator:
    """Running max, sum and p-power sum over chunks of defect values."""

    def __init__(self, p: float):
        self.p = p
        self.max = 0.0
        self.count = 0
        self._sum1 = []
        self._sump = []
        self._sump2 = []

    def add(self, vals: np.ndarray) -> None:
        if vals.size == 0:
            return
        self.max = max(self.max, float(vals.max()))
        self.count += vals.size
        self._sum1.append(float(vals.sum()))
        if math.isfinite(self.p):
            vp = vals**self.p
            self._sump.append(float(vp.sum()))
            self._sump2.append(float((vp * vp).sum()))

    def mean1(self) -> float:
        return math.fsum(self._sum1) / self.count if self.count else 0.0

    def pmean(self) -> float:
        if not self.count:
            return 0.0
        if not math.isfinite(self.p):
            return self.max
        return (math.fsum(self._sump) / self.count) ** (1 / self.p)

    def halfwidth(self) -> float:
        if self.count < 2 or not math.isfinite(self.p):
            return 0.0
        m = math.fsum(self._sump) / self.count
        var = max(math.fsum(self._sump2) / self.count - m * m, 0.0)
        return 1.96 * math.sqrt(var * self.count / (self.count - 1) / self.count)


def _quadruple_sweep(d: np.ndarray, acc: _Accumulator, acc1: _Accumulator) -> None:
    n = d.shape[0]
    K, L = np.triu_indices(n, 1)
    # pairs (k, l) with k > j form a suffix of the row-major triu ordering
    start = np.concatenate(([0], np.cumsum(np.arange(n - 1, 0, -1))))
    for i in range(n - 3):
        di = d[i]
        for j in range(i + 1, n - 2):
            k = K[start[j + 1] :]
            l = L[start[j + 1] :]
            dj = d[j]
            fp = _top_gap(d[i, j] + d[k, l], di[k] + dj[l], di[l] + dj[k]) / 2
            acc.add(fp)
            if acc1 is not acc:
                acc1.add(fp)


def _triple_sweep(d: np.ndarray, acc: _Accumulator, acc1: _Accumulator) -> None:
    n = d.shape[0]
    for i in range(n - 2):
        J, K = np.triu_indices(n - i - 1, 1)
        J += i + 1
        K += i + 1
        tp = _top_gap(d[i, J], d[i, K], d[J, K])
        acc.add(tp)
        if acc1 is not acc:
            acc1.add(tp)


def _sample_subsets(n: int, r: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` distinct sorted ``r``-subsets of ``range(n)``, uniformly."""
    total = math.comb(n, r)
    if count >= total:
        return _triples(np.arange(n)) if r == 3 else np.array(list(combinations(range(n), r)))
    if 2 * count > total:
        every = np.array(list(combinations(range(n), r)), dtype=np.intp)
        return every[np.sort(rng.choice(total, size=count, replace=False))]
    out = np.empty((0, r), dtype=np.intp)
    while len(out) < count:
        need = count - len(out)
        draw = rng.integers(0, n, size=(2 * need + 16, r))
        draw.sort(axis=1)
        ok = np.all(np.diff(draw, axis=1) > 0, axis=1)
        out = np.unique(np.concatenate([out, draw[ok]]), axis=0)
        if len(out) > count:
            out = out[rng.choice(len(out), size=count, replace=False)]
    return out


def hyp_stats(
    d,
    p: float = 1,
    *,
    sample: int | None = None,
    seed: int | None = 0,
    exact_limit: int = EXACT_QUADRUPLE_LIMIT,
) -> HypStats:
    """Hyperbolicity and ultrametricity summaries of ``d``.

    Parameters
    ----------
    d : array_like
        Distance matrix.
    p : float
        Exponent of the averages, ``1 <= p <= inf``.
    sample : int, optional
        If given, estimate from ``sample`` distinct random quadruples (and
        as many triples) drawn with ``seed``. A sample covering the whole
        population yields the exact value.
    exact_limit : int
        Exhaustive mode is refused above this many quadruples.
    """
    if not p >= 1:
        raise ValueError("p must be in [1, inf]")
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    acc_h, acc_u = _Accumulator(p), _Accumulator(p)
    acc_h1 = acc_h if p == 1 else _Accumulator(1)
    acc_u1 = acc_u if p == 1 else _Accumulator(1)

    if sample is None:
        if math.comb(n, 4) > exact_limit:
            raise ValueError(
                f"{math.comb(n, 4)} quadruples exceed the exact limit {exact_limit}; "
                "pass sample=<count>"
            )
        _quadruple_sweep(d, acc_h, acc_h1)
        _triple_sweep(d, acc_u, acc_u1)
        exact = True
    else:
        if sample < 1:
            raise ValueError("sample count must be positive")
        rng = np.random.default_rng(seed)
        if n >= 4:
            q = _sample_subsets(n, 4, sample, rng)
            x, y, z, w = q.T
            fp = _top_gap(d[x, y] + d[z, w], d[x, z] + d[y, w], d[x, w] + d[y, z]) / 2
            acc_h.add(fp)
            if acc_h1 is not acc_h:
                acc_h1.add(fp)
        if n >= 3:
            t = _sample_subsets(n, 3, sample, rng)
            x, y, z = t.T
            tp = _top_gap(d[x, y], d[x, z], d[y, z])
            acc_u.add(tp)
            if acc_u1 is not acc_u:
                acc_u1.add(tp)
        exact = sample >= math.comb(n, 4) and sample >= math.comb(n, 3)

    return HypStats(
        n=n,
        p=p,
        hyp=acc_h.max,
        um=acc_u.max,
        avg_hyp=acc_h.pmean(),
        avg_um=acc_u.pmean(),
        avg_hyp_1=acc_h1.mean1(),
        avg_um_1=acc_u1.mean1(),
        exact=exact,
        sample_count=None if sample is None else sample,
        seed=None if sample is None else seed,
        hyp_halfwidth=None if exact else acc_h.halfwidth(),
        um_halfwidth=None if exact else acc_u.halfwidth(),
    )


# ---------------------------------------------------------------------------
# bad triangles


def _adjacency(n: int, edges) -> np.ndarray:
    if isinstance(edges, np.ndarray) and edges.dtype == bool and edges.shape == (n, n):
        A = edges.copy()
    else:
        A = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            A[u, v] = A[v, u] = True
    np.fill_diagonal(A, False)
    return A


def bad_triangles(n: int, edges, *, return_triples: bool = False):
    """Number of vertex triples spanning exactly two edges.

    ``edges`` is either an iterable of pairs or a boolean adjacency matrix.
    Every two-edge path is centred at exactly one vertex, and each
    triangle contains three of them, so the count is
    ``sum_v C(deg v, 2) - 3 * triangles``.
    """
    A = _adjacency(n, edges)
    Ai = A.astype(np.int64)
    deg = Ai.sum(axis=1)
    wedges = int((deg * (deg - 1) // 2).sum())
    triangles = int(np.einsum("ij,jk,ki->", Ai, Ai, Ai)) // 6
    count = wedges - 3 * triangles
    if not return_triples:
        return count
    t = _triples(np.arange(n))
    present = A[t[:, 0], t[:, 1]].astype(int) + A[t[:, 0], t[:, 2]] + A[t[:, 1], t[:, 2]]
    return count, [tuple(map(int, row)) for row in t[present == 2]]


def integral_bad_triangles(d) -> float:
    """Integral over thresholds ``s`` of the bad-triangle count of ``G_s``.

    ``G_s`` joins every pair at distance ``<= s``. The count is piecewise
    constant between consecutive distinct distances and vanishes beyond the
    largest, so the integral is an exact finite sum. Edges are inserted one
    threshold at a time, updating the wedge and triangle counts in O(n)
    per edge.
    """
    d = np.asarray(d, dtype=np.float64)
    n = d.shape[0]
    if n < 3:
        return 0.0
    iu, ju = np.triu_indices(n, 1)
    w = d[iu, ju]
    order = np.argsort(w, kind="stable")
    A = np.zeros((n, n), dtype=bool)
    deg = np.zeros(n, dtype=np.int64)
    wedges = triangles = 0
    total = []
    pos = 0
    k = len(order)
    while pos < k:
        s = w[order[pos]]
        while pos < k and w[order[pos]] == s:
            e = order[pos]
            u, v = iu[e], ju[e]
            triangles += int(np.count_nonzero(A[u] & A[v]))
            wedges += int(deg[u] + deg[v])
            deg[u] += 1
            deg[v] += 1
            A[u, v] = A[v, u] = True
            pos += 1
        if pos < k:
            total.append((wedges - 3 * triangles) * (w[order[pos]] - s))
    return math.fsum(total)
