"""Command line interface: ``hcctree {metrics,fit,bench,synth}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .baselines import gromov_tree_fit, neighbor_join, single_linkage_ultrametric
from .fitters import best_base_tree_fit, hcc_rooted_tree_fit
from .graphs import (
    SyntheticSpec,
    balanced_tree,
    largest_component,
    parse_edge_list,
    perturb_tree,
    shortest_path_matrix,
)
from .metricspace import (
    check_distance_matrix,
    hyp_stats,
    hyperbolicity_vector,
    load_distance_csv,
    save_distance_csv,
    ultrametricity_vector,
)
from .report import BenchSummary, FitReport

ALGORITHMS = ("hcc", "gromov", "nj", "slhc")
_TOL = 1e-9


def load_input(path, fmt: str, largest: bool = False) -> np.ndarray:
    if fmt == "csv":
        return load_distance_csv(path)
    g = parse_edge_list(Path(path).read_text())
    if largest:
        g = largest_component(g)
    return shortest_path_matrix(g)


def _parse_root(value: str):
    if value in ("random", "best"):
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"root must be an index, 'random' or 'best', got {value!r}")


def run_fit(d, algorithm: str, root, seed: int = 0):
    """Run one fit; returns ``(tree or None, fitted matrix, FitReport)``."""
    n = d.shape[0]
    if algorithm in ("hcc", "gromov"):
        if root == "random":
            root = int(np.random.default_rng(seed).integers(n))
        if root == "best":
            if algorithm != "hcc":
                raise ValueError("--root best is only available for hcc")
            tree, d_fit, _, report = best_base_tree_fit(d)
        else:
            if not 0 <= root < n:
                raise ValueError(f"root {root} out of range for n={n}")
            fitter = hcc_rooted_tree_fit if algorithm == "hcc" else gromov_tree_fit
            tree, d_fit, report = fitter(d, root)
    elif algorithm == "nj":
        tree, d_fit, report = neighbor_join(d)
    elif algorithm == "slhc":
        start = time.perf_counter()
        d_fit, _ = single_linkage_ultrametric(d)
        report = FitReport.from_fit("slhc", d, d_fit, wall_time_seconds=time.perf_counter() - start)
        tree = None
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    report.seed = seed
    return tree, d_fit, report


def check_bound(d, algorithm: str, root, report: FitReport) -> tuple[bool, str]:
    """The guarantee that applies to ``algorithm``; returns ``(ok, description)``."""
    n = d.shape[0]
    scale = _TOL * max(1.0, float(d.max()) if d.size else 1.0) * max(1, n * n)
    if algorithm == "hcc" and root == "best":
        avg = hyp_stats(d).avg_hyp_1
        bound = 8 * math.comb(n - 1, 3) * avg
        report.bounds["best_base_l1"] = bound
        return report.l1_total <= bound + scale, f"l1 {report.l1_total:g} <= 8 C(n-1,3) AvgHyp {bound:g}"
    if algorithm == "hcc":
        bound = 8 * hyperbolicity_vector(d, report.base).norm(1)
        report.bounds["rooted_l1"] = bound
        return report.l1_total <= bound + scale, f"l1 {report.l1_total:g} <= 8 |Delta_w|_1 {bound:g}"
    if algorithm == "gromov":
        bound = 2 * hyperbolicity_vector(d, report.base).norm(np.inf) * math.ceil(math.log2(max(n - 2, 1)))
        report.bounds["gromov_linf"] = bound
        return report.linf <= bound + scale, f"linf {report.linf:g} <= {bound:g}"
    if algorithm == "slhc":
        bound = ultrametricity_vector(d).norm(np.inf) * math.ceil(math.log2(max(n - 1, 1)))
        report.bounds["slhc_linf"] = bound
        return report.linf <= bound + scale, f"linf {report.linf:g} <= {bound:g}"
    return True, "no guarantee checked for nj"


def cmd_metrics(args) -> int:
    d = load_input(args.input, args.format, args.largest_component)
    stats = hyp_stats(d, args.p, sample=args.sample, seed=args.seed)
    mode = "exact" if stats.exact else f"sampled ({stats.sample_count}, seed {stats.seed})"
    print(f"n        {stats.n}")
    print(f"mode     {mode}")
    print(f"Hyp      {stats.hyp:.6g}")
    print(f"AvgHyp   {stats.avg_hyp_1:.6g}")
    print(f"UM       {stats.um:.6g}")
    print(f"AvgUM    {stats.avg_um_1:.6g}")
    if args.p != 1:
        print(f"AvgHyp_p {stats.avg_hyp:.6g}  (p={args.p})")
        print(f"AvgUM_p  {stats.avg_um:.6g}  (p={args.p})")
    print(f"Bound    {stats.bound:.6g}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.json").write_text(json.dumps(stats.to_dict(), sort_keys=True) + "\n")
    return 0


def cmd_fit(args) -> int:
    d = load_input(args.input, args.format, args.largest_component)
    tree, d_fit, report = run_fit(d, args.algorithm, args.root, args.seed)
    status = 0
    if args.check:
        ok, msg = check_bound(d, args.algorithm, args.root, report)
        print(("PASS " if ok else "FAIL ") + msg)
        status = 0 if ok else 1
    print(report.to_json())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        save_distance_csv(out / "fitted.csv", d_fit)
        (out / "report.json").write_text(report.to_json() + "\n")
        if tree is not None:
            tree.save(out / "tree.txt")
    return status


def _bench_inputs(args):
    """Yield ``(seed, d, root)`` per run."""
    if args.bt:
        r, h = args.bt
        base = balanced_tree(r, h)
        for k in range(args.runs):
            seed = args.seed + k
            g = perturb_tree(base, SyntheticSpec(args.n_e, args.delta, seed))
            yield seed, shortest_path_matrix(g), 0  # apex root
    else:
        d = load_input(args.input, args.format, args.largest_component)
        for k in range(args.runs):
            seed = args.seed + k
            yield seed, d, int(np.random.default_rng(seed).integers(d.shape[0]))


def cmd_bench(args) -> int:
    if args.runs < 1:
        raise ValueError("--runs must be at least 1")
    if not args.bt and not args.input:
        raise ValueError("bench needs --input or --bt")
    algorithms = args.algorithms.split(",")
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    reports: dict[str, list[FitReport]] = {a: [] for a in algorithms}
    for seed, d, root in _bench_inputs(args):
        for a in algorithms:
            # nj and slhc are deterministic: on a fixed input one run suffices
            if a in ("nj", "slhc") and not args.bt and reports[a]:
                continue
            reports[a].append(run_fit(d, a, root, seed)[2])
    print(BenchSummary.header())
    summaries = [BenchSummary.from_reports(reports[a]) for a in algorithms]
    for s in summaries:
        print(s.row())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "runs.jsonl", "w") as fh:
            for a in algorithms:
                for r in reports[a]:
                    fh.write(r.to_json() + "\n")
        with open(out / "summary.jsonl", "w") as fh:
            for s in summaries:
                fh.write(json.dumps(s.__dict__, sort_keys=True) + "\n")
    return 0


def cmd_synth(args) -> int:
    r, h = args.bt
    spec = SyntheticSpec(args.n_e, args.delta, args.seed)
    g = perturb_tree(balanced_tree(r, h), spec)
    d = shortest_path_matrix(g)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"bt{r}_{h}_ne{args.n_e}_seed{args.seed}"
    (out / f"{stem}.edges").write_text(g.to_text())
    save_distance_csv(out / f"{stem}.csv", d)
    print(f"n={g.n} edges={g.n_edges} -> {out / stem}.{{edges,csv}}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hcctree", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_input(sp, required=True):
        sp.add_argument("--input", required=required, help="distance CSV or edge list")
        sp.add_argument("--format", choices=("csv", "edgelist"), default="csv")
        sp.add_argument("--largest-component", action="store_true",
                        help="edge lists: keep only the largest connected component")

    sp = sub.add_parser("metrics", help="hyperbolicity and ultrametricity statistics")
    add_input(sp)
    sp.add_argument("--p", type=float, default=1.0)
    sp.add_argument("--sample", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("fit", help="fit a tree or ultrametric")
    add_input(sp)
    sp.add_argument("--algorithm", choices=ALGORITHMS, default="hcc")
    sp.add_argument("--root", type=_parse_root, default=0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--check", action="store_true", help="verify the algorithm's error bound")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("bench", help="repeated seeded runs with mean and sd")
    add_input(sp, required=False)
    sp.add_argument("--algorithms", default="hcc,gromov,nj")
    sp.add_argument("--runs", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0, help="first seed; runs use seed .. seed+runs-1")
    sp.add_argument("--bt", type=int, nargs=2, metavar=("R", "H"),
                    help="regenerate a perturbed BT(R,H) per run instead of --input")
    sp.add_argument("--n-e", type=int, default=500)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("synth", help="write a perturbed balanced tree and its metric")
    sp.add_argument("--bt", type=int, nargs=2, metavar=("R", "H"), required=True)
    sp.add_argument("--n-e", type=int, default=500)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
