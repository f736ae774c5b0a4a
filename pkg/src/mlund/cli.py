"""Command-line entry point: ``mlund {datagen,cluster,mlund,meld,compare}``.

Errors are reported on stderr as a single line ``ERROR <CODE> <message>`` with
exit status 2 for usage errors and 1 otherwise.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import io, schemas, synth
from .baselines import hsc_multiscale, kmeans, slc, slc_cut, slc_select, spectral_cluster
from .errors import MlundError
from .geometry import kde
from .lund import lund_run
from .markov import DEFAULT_M, GraphConfig, PointCloud, build_markov
from .meld import meld_report
from .metrics import Undefined, nmi
from .mlund import SweepConfig, fixed_k, mlund_sweep

ALGORITHMS = ("mlund", "hsc", "sc", "kmeans", "slc")
MULTISCALE = ("mlund", "hsc", "slc")
SHAPES = {
    "gaussians": synth.gen_gaussians4,
    "rings": synth.gen_rings3,
    "bottleneck": synth.gen_bottlenecks,
    "trapezoid": synth.gen_trapezoid,
}


class UsageError(Exception):
    code = "USAGE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return x


def _nonneg_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (x >= 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"must be a nonnegative finite number, got {text}")
    return x


def _positive_int(text: str) -> int:
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if x < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return x


def parse_range(text: str) -> np.ndarray:
    """``a,b,c`` lists values; ``lo:hi:count`` is ``count`` log-spaced values from lo to hi."""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            lo, hi, count = float(lo), float(hi), int(count)
            if not (0 < lo <= hi and count >= 1):
                raise ValueError
            return np.geomspace(lo, hi, count)
        vals = np.array([float(v) for v in text.split(",") if v.strip()])
        if vals.size == 0:
            raise ValueError
        return vals
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use a,b,c or lo:hi:count") from None


def _add_graph_args(p: argparse.ArgumentParser, kde_required: bool) -> None:
    p.add_argument("--sigma", type=_positive_float, required=True, help="diffusion scale")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--knn", type=_positive_int, help="symmetrized KNN graph with this many neighbors")
    g.add_argument("--complete", action="store_true", help="complete graph (default)")
    if kde_required:
        p.add_argument("--sigma0", type=_positive_float, required=True, help="KDE bandwidth")
        p.add_argument("--kde-nn", type=_positive_int, required=True, help="KDE neighbor count")
    p.add_argument("--m", type=_positive_int, default=DEFAULT_M, help="number of eigenpairs kept")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mlund", description="Multiscale diffusion clustering.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("datagen", help="write a synthetic point cloud and its labels")
    p.add_argument("--shape", choices=sorted(SHAPES), required=True)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("cluster", help="LUND at one diffusion time")
    p.add_argument("--input", required=True)
    p.add_argument("--t", type=_nonneg_float, required=True)
    _add_graph_args(p, kde_required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("mlund", help="multiscale sweep with total-VI selection")
    p.add_argument("--input", required=True)
    _add_graph_args(p, kde_required=True)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--tau", type=float, default=1e-5)
    p.add_argument("--out", required=True)

    p = sub.add_parser("meld", help="stochastic-complement analysis of given clusterings")
    p.add_argument("--input", required=True)
    p.add_argument("--labels", nargs="+", required=True)
    _add_graph_args(p, kde_required=False)
    p.add_argument("--epsilons", type=parse_range)
    p.add_argument("--times", type=parse_range)
    p.add_argument("--out", required=True)

    p = sub.add_parser("compare", help="NMI of several algorithms against ground truth")
    p.add_argument("--input", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--algorithms", required=True)
    p.add_argument("--fixed-k", type=_positive_int)
    p.add_argument("--sigma", type=_positive_float)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--knn", type=_positive_int)
    g.add_argument("--complete", action="store_true")
    p.add_argument("--sigma0", type=_positive_float)
    p.add_argument("--kde-nn", type=_positive_int)
    p.add_argument("--m", type=_positive_int, default=DEFAULT_M)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--tau", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return parser


def _graph_config(args, kde: bool = True) -> GraphConfig:
    if kde:
        return GraphConfig(sigma=args.sigma, sigma0=args.sigma0, kde_neighbors=args.kde_nn, knn=args.knn)
    # The KDE fields are unused when only the transition matrix is needed.
    return GraphConfig(sigma=args.sigma, sigma0=1.0, kde_neighbors=1, knn=args.knn)


def _graph_record(args, kde: bool = True) -> dict:
    return {"sigma": args.sigma, "sigma0": args.sigma0 if kde else None, "knn": args.knn,
            "kde_neighbors": args.kde_nn if kde else None, "m": args.m}


def cmd_datagen(args) -> None:
    gen = SHAPES[args.shape]
    data = gen(seed=args.seed) if args.n is None else gen(n=args.n, seed=args.seed)
    io.write_points(args.out, data.points)
    io.write_labels(io.labels_path_for(args.out), data.truth_labels)


def _sidecar_path(out) -> Path:
    p = Path(out)
    side = p.with_suffix(".json") if p.suffix else p.with_name(p.name + ".json")
    if side == p:
        side = p.with_name(p.name + ".meta.json")
    return side


def cmd_cluster(args) -> None:
    data = PointCloud(io.read_points(args.input))
    cfg = _graph_config(args)
    model = build_markov(data, cfg, m=args.m)
    run = lund_run(model, kde(data, cfg), args.t)
    c = run.clustering
    io.write_labels(args.out, c.labels)
    sidecar = {
        "n": data.n,
        "t": float(args.t),
        "K": int(c.K),
        "mode_indices": [int(i) for i in c.modes],
        "score_curve": [float(v) for v in run.score[run.score_order]],
        "graph": _graph_record(args),
    }
    io.write_json(_sidecar_path(args.out), sidecar, schemas.CLUSTER_SIDECAR)


def cmd_mlund(args) -> None:
    data = PointCloud(io.read_points(args.input))
    cfg = _graph_config(args)
    sweep_cfg = SweepConfig(beta=args.beta, tau=args.tau)
    model = build_markov(data, cfg, m=args.m)
    result = mlund_sweep(model, kde(data, cfg), sweep_cfg)
    out = Path(args.out)
    label_dir = out.with_name(out.stem + "_labels")
    paths = []
    for i, run in enumerate(result.runs):
        path = label_dir / f"t{i:03d}.csv"
        io.write_labels(path, run.clustering.labels)
        paths.append(path.relative_to(out.parent).as_posix())
    optimal = None
    if result.optimal_index is not None:
        i = result.optimal_index
        optimal = {"time": float(result.times[i]), "index": int(i), "K": int(result.optimal.K),
                   "labels_path": paths[i]}
    report = {
        "n": data.n,
        "beta": sweep_cfg.beta,
        "tau": sweep_cfg.tau,
        "lambda2": model.lambda2,
        "pi_min": model.pi_min,
        "T": int(result.T),
        "times": [float(t) for t in result.times],
        "K_t": [int(k) for k in result.K_t],
        "J": [int(j) for j in result.J],
        "total_vi": {repr(float(t)): float(v) for t, v in result.total_vi.items()},
        "labels_paths": paths,
        "optimal": optimal,
        "graph": _graph_record(args),
    }
    io.write_json(out, report, schemas.MLUND_REPORT)


def _interval_record(iv) -> dict:
    return {"epsilon": iv.epsilon, "lower": io.finite_or_none(iv.lower),
            "upper": io.finite_or_none(iv.upper), "empty": bool(iv.empty)}


def _bounds_record(b) -> dict:
    return {"t": b.t, "gamma": b.gamma, "in_upper": io.finite_or_none(b.in_upper),
            "btw_lower": io.finite_or_none(b.btw_lower), "s_inf_min_norm": b.s_inf_min_norm,
            "measured_in": b.measured_in, "measured_btw": b.measured_btw,
            "in_holds": bool(b.in_holds), "btw_holds": bool(b.btw_holds),
            "in_upper_weighted": io.finite_or_none(b.in_upper_weighted),
            "btw_lower_weighted": io.finite_or_none(b.btw_lower_weighted),
            "weighted_holds": bool(b.weighted_holds)}


def _relative_to_report(path, report) -> str:
    # Paths relative to the report keep it identical when a run directory moves.
    return Path(os.path.relpath(Path(path).resolve(), Path(report).resolve().parent)).as_posix()


def cmd_meld(args) -> None:
    data = PointCloud(io.read_points(args.input))
    model = build_markov(data, _graph_config(args, kde=False), m=args.m)
    label_sets = [io.read_labels(p, data.n) for p in args.labels]
    rep = meld_report(model, label_sets, args.epsilons, args.times)
    clusterings = []
    for path, a in zip(args.labels, rep.analyses):
        c = a.constants
        clusterings.append({
            "labels_path": _relative_to_report(path, args.out),
            "K": int(c.K),
            "constants": {"lambda_next": c.lambda_next, "delta": c.delta, "kappa": io.finite_or_none(c.kappa)},
            "interval_curve": [_interval_record(iv) for iv in a.intervals],
            "gamma": [{"t": b.t, "gamma": b.gamma} for b in a.bounds],
            "meyer": [{"t": r.t, "lhs": r.lhs, "rhs": io.finite_or_none(r.rhs), "holds": bool(r.holds)}
                      for r in a.meyer],
            "bounds": [_bounds_record(b) for b in a.bounds],
        })
    overlaps = [{"a": a, "b": b, "overlap": bool(eps), "epsilons": eps}
                for (a, b), eps in sorted(rep.overlaps.items())]
    report = {"n": rep.n, "epsilons": [float(e) for e in rep.epsilons],
              "times": [float(t) for t in rep.times], "clusterings": clusterings,
              "overlaps": overlaps, "graph": _graph_record(args, kde=False)}
    io.write_json(args.out, report, schemas.MELD_REPORT)


def _nmi_text(c, truth) -> str:
    if c is None:
        return "none"
    value = nmi(c, truth)
    return "undefined" if value is Undefined else repr(float(value))


def cmd_compare(args) -> None:
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    unknown = sorted(set(algorithms) - set(ALGORITHMS))
    if unknown or not algorithms:
        raise UsageError(f"unknown algorithm(s) {unknown}; choose from {','.join(ALGORITHMS)}")
    X = io.read_points(args.input)
    truth = io.read_labels(args.truth, X.shape[0])
    data = PointCloud(X, truth)
    K = args.fixed_k if args.fixed_k is not None else int(np.unique(truth).size)
    needs_graph = {"mlund", "hsc", "sc"} & set(algorithms)
    model = density = None
    if needs_graph:
        missing = [f for f in ("sigma", "sigma0", "kde_nn") if getattr(args, f) is None]
        if missing:
            raise UsageError(f"{', '.join(sorted(needs_graph))} need --sigma, --sigma0 and --kde-nn")
        cfg = _graph_config(args)
        model = build_markov(data, cfg, m=args.m)
        density = kde(data, cfg)
    sweep_cfg = SweepConfig(beta=args.beta, tau=args.tau)
    sweep = None
    if {"mlund", "hsc"} & set(algorithms):
        sweep = mlund_sweep(model, density, sweep_cfg)
    rows = []
    for alg in algorithms:
        if alg == "mlund":
            fixed, _, _ = fixed_k(sweep, K)
            multi = sweep.optimal
        elif alg == "hsc":
            # Every grid time with eigengap estimate K yields spectral clustering at K.
            fixed = spectral_cluster(model, K, args.seed)
            multi, _ = hsc_multiscale(model, sweep.times, args.seed)
        elif alg == "sc":
            fixed, multi = spectral_cluster(model, K, args.seed), None
        elif alg == "kmeans":
            fixed, multi = kmeans(X, K, args.seed), None
        else:
            dendro = slc(X)
            fixed, multi = slc_cut(dendro, K), slc_select(dendro)
        rows.append([alg, "fixed-K", int(fixed.K), _nmi_text(fixed, truth)])
        if alg in MULTISCALE:
            rows.append([alg, "multiscale", "none" if multi is None else int(multi.K), _nmi_text(multi, truth)])
    io.write_csv_rows(args.out, ["algorithm", "mode", "K", "nmi"], rows)


COMMANDS = {"datagen": cmd_datagen, "cluster": cmd_cluster, "mlund": cmd_mlund,
            "meld": cmd_meld, "compare": cmd_compare}


def _one_line(message) -> str:
    return " ".join(str(message).split())


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"WARNING {category.__name__} {_one_line(message)}", file=sys.stderr)


def main(argv=None) -> int:
    warnings.showwarning = _show_warning
    try:
        args = build_parser().parse_args(argv)
        # A single BLAS thread keeps floating-point reductions, and so the
        # output files, identical across machines and thread settings.
        with threadpool_limits(limits=1):
            COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ERROR USAGE {_one_line(exc)}", file=sys.stderr)
        return 2
    except MlundError as exc:
        print(f"ERROR {exc.code} {_one_line(exc)}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ERROR IO {_one_line(exc)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
