"""Command line front end: ``pvm dist|select|classify|cv|gen-mixture``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .classifier import classify, test_error
from .coverage import build_incidence
from .data_model import CandidateSet, Dataset, InputError, PvmConfig, validate_inputs
from .dissimilarity import (distance_quantile, epsilon_grid, euclidean_matrix,
                            kernel_to_distance, positive_entries, rank_transform)
from .greedy import greedy_select, trace_table
from .harness import gen_mixture, kfold_cv
from .lp_round import build_class_lp, lp_round, write_lp
from .simplex import LpError

EXIT_INPUT = 2
EXIT_NUMERIC = 3


def _load_problem(args):
    """Dataset, candidate set and training dissimilarities from --labels/--dist/--points."""
    labels = io.read_labels(args.labels)
    if args.dist:
        D = io.read_matrix(args.dist)
        dataset = Dataset(labels, args.num_classes or 0)
        identity = D.shape[0] == D.shape[1] and not args.separate_candidates
        candidates = CandidateSet(identity=identity, size=D.shape[1])
    elif args.points:
        X = io.read_matrix(args.points)
        dataset = Dataset(labels, args.num_classes or 0, X)
        if args.candidates:
            candidates = CandidateSet(io.read_matrix(args.candidates))
        else:
            candidates = CandidateSet.same_as(dataset)
        Z = dataset.points if candidates.identity else candidates.points
        D = euclidean_matrix(dataset.points, Z)
    else:
        raise InputError("need --dist or --points")
    return validate_inputs(dataset, candidates, D)


def _add_data_args(p, candidates=True):
    p.add_argument("--labels", required=True, help="one 1-based label per line")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--dist", help="n x m dissimilarity CSV (rows = training points)")
    src.add_argument("--points", help="n x p feature CSV (Euclidean distance)")
    if candidates:
        p.add_argument("--candidates", help="m x p candidate CSV (default: Z = X)")
    p.add_argument("--separate-candidates", action="store_true",
                   help="a square --dist matrix is not training-by-training")
    p.add_argument("--num-classes", type=int, help="L (default: largest label)")


def cmd_dist(args) -> int:
    if args.metric == "kernel":
        if not args.kernel:
            raise InputError("--metric kernel needs --kernel")
        K = io.read_matrix(args.kernel)
        rows = cols = None
        if args.n_train is not None:
            rows = np.arange(args.n_train)
            cols = rows if args.z_equals_x else np.arange(args.n_train, K.shape[0])
        D = kernel_to_distance(K, rows, cols)
    else:
        if not args.points:
            raise InputError(f"--metric {args.metric} needs --points")
        X = io.read_matrix(args.points)
        Z = io.read_matrix(args.candidates) if args.candidates else X
        D = euclidean_matrix(X, Z)
        if args.metric == "rank":
            D = rank_transform(D)
    io.write_matrix(args.out, D)
    print(f"wrote {D.shape[0]} x {D.shape[1]} dissimilarities to {args.out}")
    return 0


def cmd_select(args) -> int:
    t0 = time.perf_counter()
    prob = _load_problem(args)
    D, ds = prob.D, prob.dataset
    if args.epsilon is not None:
        eps = args.epsilon
    else:
        eps = distance_quantile(D, args.epsilon_quantile)
    config = PvmConfig(eps, args.lam, args.algorithm, args.rounds, args.seed)
    lam = config.lambda_for(ds.n)
    inc = build_incidence(D, ds.y, eps, ds.num_classes)

    extra = {}
    if config.algorithm == "greedy":
        sol = greedy_select(inc, lam)
        extra["trace"] = [
            {"step": s, "candidate": j, "label": l, "d_xi": dx, "d_eta": de,
             "improvement": imp, "d_obj": float(do)}
            for s, j, l, dx, de, imp, do in trace_table(sol.trace)]
    else:
        res = lp_round(inc, lam, config.rounds, config.seed)
        sol = res.solution
        extra["lp"] = {"opt_lp": res.opt_lp, "bound": res.bound,
                       "best_round": res.best_index,
                       "obj_per_round": [float(v) for v in res.objectives]}
    if args.export_lp:
        out_dir = Path(args.export_lp)
        out_dir.mkdir(parents=True, exist_ok=True)
        for l in range(ds.num_classes):
            write_lp(build_class_lp(inc, lam, l), out_dir / f"class_{l + 1}.lp")

    one_nn = bool(eps <= positive_entries(D).min()) and prob.candidates.identity
    report = {
        "epsilon": eps, "lambda": lam, "algorithm": config.algorithm,
        "rounds": config.rounds, "seed": config.seed,
        "epsilon_quantile": args.epsilon_quantile,
    }
    doc = io.solution_to_dict(sol, report, one_nn_regime=one_nn,
                              seconds=round(time.perf_counter() - t0, 6), **extra)
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    obj = doc["objective"]
    print(f"epsilon={eps:.6g} lambda={lam:.6g} algorithm={config.algorithm}")
    print("prototypes per class: " + ", ".join(
        f"{l + 1}:{c}" for l, c in enumerate(sol.counts)))
    print(f"objective: xi={obj['xi']} eta={obj['eta']} count={obj['count']} "
          f"total={obj['total']:.6g}")
    if "lp" in extra:
        print(f"OPT_LP={extra['lp']['opt_lp']:.6g} bound n/e+OPT_LP={extra['lp']['bound']:.6g}")
    if one_nn:
        print("note: epsilon is at or below the smallest interpoint distance (1-NN regime)")
    if not args.out:
        sys.stdout.write(text)
    return 0


def cmd_classify(args) -> int:
    sol, doc = io.read_solution(args.solution)
    if args.dist:
        Dq = io.read_matrix(args.dist)
    else:
        if not args.candidates:
            raise InputError("--points needs --candidates (the rows of Z)")
        Dq = euclidean_matrix(io.read_matrix(args.points), io.read_matrix(args.candidates))
    if Dq.shape[1] != sol.num_candidates:
        raise InputError(f"query matrix has {Dq.shape[1]} columns, "
                         f"solution has {sol.num_candidates} candidates")
    res = classify(Dq, sol)
    rows = np.column_stack([res.labels, res.nearest, res.distance])
    if args.out:
        io.write_matrix(args.out, rows, header=["label", "prototype", "distance"])
    else:
        for lab, j, d in zip(res.labels, res.nearest, res.distance):
            print(f"{lab},{j},{d:.17g}")
    if args.truth:
        truth = io.read_labels(args.truth)
        print(f"test error: {test_error(res.labels, truth):.6g}", file=sys.stderr)
    return 0


def cmd_cv(args) -> int:
    prob = _load_problem(args)
    D, ds = prob.D, prob.dataset
    grid = epsilon_grid(D, args.grid_count, args.q_lo, args.q_hi)
    algorithms = ["greedy", "lp_round"] if args.algorithm == "both" else [args.algorithm]
    rows, chosen = [], {}
    for alg in algorithms:
        cv = kfold_cv(D, ds.y, grid, args.lam, alg, args.folds, args.seed, args.rounds,
                      same_candidates=prob.candidates.identity, num_classes=ds.num_classes)
        chosen[alg] = cv.chosen
        for eps, err, se, cnt in cv.table():
            rows.append((alg, eps, err, se, cnt, int(eps == cv.chosen)))
    header = "algorithm,epsilon,cv_error,std_error,mean_prototypes,chosen"
    lines = [header] + [f"{a},{e:.17g},{m:.17g},{s:.17g},{c:.17g},{k}" for a, e, m, s, c, k in rows]
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
    else:
        print("\n".join(lines))
    for alg, eps in chosen.items():
        print(f"chosen epsilon ({alg}, 1-SE rule): {eps:.17g}", file=sys.stderr)
    return 0


def cmd_gen_mixture(args) -> int:
    mix = gen_mixture(args.seed, args.n)
    io.write_matrix(args.out, mix.dataset.points, header=["x1", "x2"])
    io.write_labels(args.labels_out, mix.dataset.labels)
    print(f"wrote {args.n} points to {args.out} and labels to {args.labels_out}")
    if args.test_out or args.test_labels_out:
        if not (args.test_out and args.test_labels_out):
            raise InputError("--test-out and --test-labels-out go together")
        # fresh points from the same subcentres, on an independent stream
        test = gen_mixture([args.seed, 1], args.test_n or args.n, mix.subcenters).dataset
        io.write_matrix(args.test_out, test.points, header=["x1", "x2"])
        io.write_labels(args.test_labels_out, test.labels)
        print(f"wrote {test.n} test points to {args.test_out} and labels to "
              f"{args.test_labels_out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pvm", description="prototype selection by set cover")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="build a dissimilarity matrix")
    p.add_argument("--points")
    p.add_argument("--candidates")
    p.add_argument("--kernel", help="square Gram matrix CSV")
    p.add_argument("--n-train", type=int,
                   help="kernel rows 0..n-1 are X; the remaining rows are Z")
    p.add_argument("--z-equals-x", action="store_true",
                   help="with --n-train, use X as the candidates too")
    p.add_argument("--metric", choices=["euclidean", "kernel", "rank"], default="euclidean")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("select", help="choose prototypes")
    _add_data_args(p)
    eps = p.add_mutually_exclusive_group(required=True)
    eps.add_argument("--epsilon", type=float)
    eps.add_argument("--epsilon-quantile", type=float,
                     help="quantile of the positive dissimilarities (0 = smallest)")
    p.add_argument("--lambda", dest="lam", type=float, help="prototype cost (default 1/n)")
    p.add_argument("--algorithm", choices=["greedy", "lp_round"], default="greedy")
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="solution JSON (default: stdout)")
    p.add_argument("--export-lp", metavar="DIR", help="write per-class LP files")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("classify", help="nearest-prototype predictions")
    p.add_argument("--solution", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--dist", help="q x m query-to-candidate dissimilarities")
    src.add_argument("--points", help="q x p query points")
    p.add_argument("--candidates", help="m x p candidate points (with --points)")
    p.add_argument("--truth", help="labels of the queries")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("cv", help="cross-validate over an epsilon grid")
    _add_data_args(p)
    p.add_argument("--grid-count", type=int, default=10)
    p.add_argument("--q-lo", type=float, default=0.0)
    p.add_argument("--q-hi", type=float, default=0.5)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--algorithm", choices=["greedy", "lp_round", "both"], default="greedy")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("gen-mixture", help="sample the 3-class Gaussian mixture")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--out", required=True)
    p.add_argument("--labels-out", required=True)
    p.add_argument("--test-out", help="also sample a test set from the same mixture")
    p.add_argument("--test-labels-out")
    p.add_argument("--test-n", type=int, help="test set size (default: --n)")
    p.set_defaults(func=cmd_gen_mixture)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"pvm: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LpError as exc:
        print(f"pvm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
