"""Fit error records and their aggregation over benchmark runs."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np


def fit_errors(d, d_fit) -> tuple[float, float, float]:
    """``(l1_total, l1_avg, linf)`` over unordered pairs."""
    d = np.asarray(d, dtype=np.float64)
    d_fit = np.asarray(d_fit, dtype=np.float64)
    if d.shape != d_fit.shape:
        raise ValueError("shape mismatch between input and fitted distances")
    n = d.shape[0]
    if n < 2:
        return 0.0, 0.0, 0.0
    iu = np.triu_indices(n, 1)
    err = np.abs(d[iu] - d_fit[iu])
    total = float(math.fsum(err.tolist()))
    return total, total / len(err), float(err.max())


@dataclass
class FitReport:
    """Errors and timing of one fit."""

    algorithm: str
    n: int
    l1_total: float
    l1_avg: float
    linf: float
    wall_time_seconds: float = 0.0
    base: int | None = None
    seed: int | None = None
    bounds: dict = field(default_factory=dict)

    @classmethod
    def from_fit(cls, algorithm: str, d, d_fit, **kwargs) -> "FitReport":
        total, avg, linf = fit_errors(d, d_fit)
        return cls(algorithm, int(np.shape(d)[0]), total, avg, linf, **kwargs)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _mean_sd(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=np.float64)
    if len(a) == 0:
        return math.nan, math.nan
    sd = float(a.std(ddof=1)) if len(a) > 1 else 0.0
    return float(a.mean()), sd


@dataclass
class BenchSummary:
    """Mean and sample standard deviation of one algorithm's runs."""

    algorithm: str
    runs: int
    l1_avg_mean: float
    l1_avg_sd: float
    linf_mean: float
    linf_sd: float
    time_mean: float
    time_sd: float
    seeds: list = field(default_factory=list)

    @classmethod
    def from_reports(cls, reports: list[FitReport]) -> "BenchSummary":
        if not reports:
            raise ValueError("need at least one report")
        algs = {r.algorithm for r in reports}
        if len(algs) != 1:
            raise ValueError(f"reports mix algorithms: {sorted(algs)}")
        l1 = _mean_sd([r.l1_avg for r in reports])
        li = _mean_sd([r.linf for r in reports])
        tm = _mean_sd([r.wall_time_seconds for r in reports])
        return cls(
            reports[0].algorithm, len(reports), *l1, *li, *tm, [r.seed for r in reports]
        )

    def row(self) -> str:
        return (
            f"{self.algorithm:<8} {self.runs:>5} "
            f"{self.l1_avg_mean:.5f} ± {self.l1_avg_sd:.5f}  "
            f"{self.linf_mean:.5f} ± {self.linf_sd:.5f}  "
            f"{self.time_mean:.4f} ± {self.time_sd:.4f}"
        )

    @staticmethod
    def header() -> str:
        return f"{'algo':<8} {'runs':>5} {'l1_avg (mean ± sd)':<20} {'linf (mean ± sd)':<20} time_s"
