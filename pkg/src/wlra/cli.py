"""Command line front-end: ``wlra {solve,reduce,biclique,landscape,verify}``.

Exit codes: 0 ok, 1 input error, 2 capacity or degenerate input,
3 divergent solve (unattained infimum), 4 bound check failed.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .analysis import (BoundReport, extract_biclique, indicator_factors, lemma_battery, recover_biclique_count,
                       sample_candidates)
from .biclique import BipartiteGraph, max_edge_biclique, maximal_bicliques
from .core import WeightMatrix, wlra_objective
from .exceptions import (CapacityError, DegenerateInputError, HypothesisViolationError, InconsistencyError,
                         ParameterError, WLRAError)
from .reductions import (BLOCK_RANK_R, MISSING_DATA, POSITIVE_WEIGHT, build_block_rank_r, build_md1d,
                         build_w1d, lemma3_d, lemma6_d)
from .solver import SolveConfig, closed_form_v, grid_local_minima, landscape_grid, solve_rank_one, solve_rank_r

EXIT_OK, EXIT_INPUT, EXIT_CAPACITY, EXIT_DIVERGED, EXIT_BOUND = 0, 1, 2, 3, 4

KIND_NAMES = {"w1d": POSITIVE_WEIGHT, "md1d": MISSING_DATA, "block": BLOCK_RANK_R}


@dataclass
class RunReport:
    command: str
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def _config(args) -> SolveConfig:
    return SolveConfig(max_sweeps=args.max_sweeps, rel_tol=args.tol, starts=args.starts, seed=args.seed,
                       nonneg=args.nonneg)


def load_problem(matrix_path, weight_path=None):
    """Data and weights from files; ``?`` entries of the matrix get weight 0."""
    mm = io.read_masked(matrix_path)
    W = mm.weights().values
    if weight_path is not None:
        Wf = io.read_weights(weight_path).values
        if Wf.shape != mm.shape:
            raise io.FormatError(f"weights have shape {Wf.shape}, matrix has shape {mm.shape}", weight_path)
        W = W * Wf
    elif mm.known.all():
        W = np.ones(mm.shape)
    return mm.values, WeightMatrix(W)


def cmd_solve(matrix_path, weight_path=None, rank=1, cfg: SolveConfig | None = None, out=None) -> RunReport:
    cfg = cfg or SolveConfig()
    M, W = load_problem(matrix_path, weight_path)
    if rank == 1:
        best, runs = solve_rank_one(M, W, cfg)
    else:
        best, runs = solve_rank_r(M, W, rank, cfg)
    rep = RunReport("solve", [str(p) for p in (matrix_path, weight_path) if p])
    rep.summary = {"objective": best.objective, "converged": best.converged, "diverged": best.diverged,
                   "start_index": best.start_index, "sweeps_used": best.sweeps_used, "rank": rank}
    if out:
        doc = best.to_dict()
        doc["starts"] = [r.to_dict(with_factors=False) for r in runs]
        Path(out).write_text(json.dumps(doc, indent=2) + "\n")
        rep.outputs.append(str(out))
    rep.exit_code = EXIT_DIVERGED if best.diverged else EXIT_OK
    return rep


def resolve_d(spec, kind, E_count, rank=1) -> float:
    """Numeric ``d`` or ``auto:eps`` (smallest admissible value for that accuracy)."""
    spec = str(spec)
    if spec.startswith("auto:"):
        try:
            eps = float(spec[5:])
        except ValueError:
            raise ParameterError(f"cannot parse accuracy in {spec!r}") from None
        if kind == MISSING_DATA:
            # the bound needs d strictly above the threshold
            return lemma6_d(E_count, eps) + 1.0
        return lemma3_d(rank * E_count, eps)
    try:
        return float(spec)
    except ValueError:
        raise ParameterError(f"--d must be a number or auto:eps, got {spec!r}") from None


def cmd_reduce(graph_path, kind="w1d", d="auto:1", rank=1, out=None) -> RunReport:
    if kind not in KIND_NAMES:
        raise ParameterError(f"unknown reduction kind {kind!r}")
    G = io.read_graph(graph_path)
    k = KIND_NAMES[kind]
    r = rank if k == BLOCK_RANK_R else 1
    E = G.edge_count
    if k == MISSING_DATA and G.zero_count == 0:
        raise DegenerateInputError("graph is complete bipartite (Z = 0); nothing to reduce")
    dval = resolve_d(d, k, max(E, 1), r)
    if k == POSITIVE_WEIGHT:
        inst = build_w1d(G, dval)
    elif k == MISSING_DATA:
        inst = build_md1d(G, dval)
    else:
        inst = build_block_rank_r(G, r, dval)
    best, p = max_edge_biclique(G)
    rep = RunReport("reduce", [str(graph_path)])
    if out:
        rep.outputs = [str(x) for x in io.save_instance(inst, out)]
    rep.summary = {"kind": k, "d": inst.d, "Z": G.zero_count, "rows": inst.shape[0], "cols": inst.shape[1],
                   "edges": E, "max_biclique_edges": best.edge_count, "predicted_optimum": r * p}
    return rep


def cmd_biclique(graph_path, mode="max") -> RunReport:
    G = io.read_graph(graph_path)
    best, p = max_edge_biclique(G)
    rep = RunReport("biclique", [str(graph_path)])
    rep.summary = {"edges": G.edge_count, "max_biclique_edges": best.edge_count, "optimum": p,
                   "max_biclique": best.label()}
    if mode == "maximal":
        rep.summary["maximal"] = [B.label() for B in maximal_bicliques(G)]
    elif mode != "max":
        raise ParameterError(f"unknown mode {mode!r}")
    return rep


def cmd_landscape(matrix_path, weight_path=None, grid_n=201, out=None) -> RunReport:
    M, W = load_problem(matrix_path, weight_path)
    pts = landscape_grid(M, W, grid_n)
    mins = grid_local_minima(pts)
    rep = RunReport("landscape", [str(p) for p in (matrix_path, weight_path) if p])
    if out:
        io.write_landscape_csv(out, pts)
        rep.outputs.append(str(out))
    binary = np.all((M == 0) | (M == 1))
    found = []
    for x, y, f in mins:
        entry = {"x": x, "y": y, "objective": f}
        if binary:
            u = np.array([x, y, math.sqrt(max(0.0, 1 - x * x - y * y))])
            v = closed_form_v(M, W, u)
            try:
                entry["biclique"] = extract_biclique(BipartiteGraph(M), u, v, 0.5).label()
            except HypothesisViolationError:
                entry["biclique"] = None
        found.append(entry)
    rep.summary = {"grid_points": len(pts), "minima": found,
                   "grid_minimum": min(f for _, _, f in pts)}
    return rep


def certified_eps(inst) -> float:
    """Tightest accuracy the instance's ``d`` certifies (the inverse of the ``d`` thresholds)."""
    E = inst.edge_count * inst.rank
    if E == 0:
        return 1.0
    if inst.kind == MISSING_DATA:
        if inst.d <= math.sqrt(E):
            return math.inf
        return math.sqrt(8.0 * E**3.5 / (inst.d - math.sqrt(E)))
    return (64.0 * E**6 / inst.d) ** 0.25


def _candidates(inst, spec, cfg):
    G = inst.source
    if spec == "witness":
        return [indicator_factors(inst, max_edge_biclique(G)[0])]
    if spec == "indicators":
        Bs = maximal_bicliques(G) or [max_edge_biclique(G)[0]]
        return [indicator_factors(inst, B) for B in Bs]
    if spec.startswith("random:"):
        try:
            n = int(spec[7:])
        except ValueError:
            raise ParameterError(f"cannot parse candidate count in {spec!r}") from None
        if inst.kind == BLOCK_RANK_R:
            raise ParameterError("random candidates are not available for block instances")
        return sample_candidates(inst, n, seed=cfg.seed)
    if spec == "solve":
        if inst.rank == 1:
            runs = solve_rank_one(inst.M, inst.W, cfg)[1]
        else:
            runs = solve_rank_r(inst.M, inst.W, inst.rank, cfg)[1]
        return [r.factors for r in runs]
    raise ParameterError(f"unknown candidate source {spec!r}")


def cmd_verify(instance_dir, eps=1.0, candidates="indicators", cfg: SolveConfig | None = None,
               stream=None) -> RunReport:
    cfg = cfg or SolveConfig()
    if not (0 < eps <= 1):
        raise ParameterError(f"eps must lie in (0, 1], got {eps}")
    inst = io.load_instance(instance_dir)
    G = inst.source
    cands = _candidates(inst, candidates, cfg)
    if inst.kind == BLOCK_RANK_R:
        p_bar = min(wlra_objective(inst.M, inst.W, F) for F in cands) if cands else math.inf
        p = max_edge_biclique(G)[1]
        bound = inst.rank * p
        reports = [BoundReport("block_upper", inst.d >= lemma3_d(max(1, inst.rank * inst.edge_count), eps),
                               p_bar, bound, p_bar <= bound * (1 + 1e-12), bound - p_bar)]
        per_copy = p_bar / inst.rank
    else:
        reports, p_bar = lemma_battery(inst, eps, cands)
        per_copy = p_bar
    rep = RunReport("verify", [str(instance_dir)])
    for r in reports:
        if stream is not None:
            print(r.to_json(), file=stream)
    truth = max_edge_biclique(G)[0].edge_count
    acc = min(eps, certified_eps(inst))
    try:
        recovered = recover_biclique_count(G.edge_count, per_copy, acc) if math.isfinite(per_copy) else None
    except InconsistencyError:
        recovered = None
    ok = all(r.ok for r in reports) and recovered == truth
    rep.summary = {"kind": inst.kind, "eps": eps, "recovery_eps": acc, "candidates": len(cands),
                   "best_objective": p_bar, "recovered_max_biclique_edges": recovered,
                   "oracle_max_biclique_edges": truth,
                   "checks": {r.name: r.ok for r in reports}}
    rep.exit_code = EXIT_OK if ok else EXIT_BOUND
    return rep


def _add_solver_flags(p):
    p.add_argument("--starts", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-sweeps", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--nonneg", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wlra", description=__doc__.splitlines()[0])
    ap.add_argument("--report", help="write the run report as JSON to this path")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="weighted low-rank approximation of a matrix file")
    p.add_argument("matrix")
    p.add_argument("weights", nargs="?")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--out", help="JSON solve report")
    _add_solver_flags(p)

    p = sub.add_parser("reduce", help="build a WLRA instance from a graph")
    p.add_argument("graph")
    p.add_argument("--kind", choices=sorted(KIND_NAMES), default="w1d")
    p.add_argument("--d", default="auto:1", help="number or auto:EPS")
    p.add_argument("--rank", type=int, default=2, help="number of copies for --kind block")
    p.add_argument("--out", required=True, help="instance directory")

    p = sub.add_parser("biclique", help="maximum-edge biclique of a graph")
    p.add_argument("graph")
    p.add_argument("--mode", choices=["max", "maximal"], default="max")

    p = sub.add_parser("landscape", help="rank-one objective on a grid (3-row matrices)")
    p.add_argument("matrix")
    p.add_argument("weights", nargs="?")
    p.add_argument("--grid", type=int, default=201)
    p.add_argument("--out", help="CSV file")

    p = sub.add_parser("verify", help="check bounds on a saved instance")
    p.add_argument("instance")
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--candidates", default="indicators", help="witness, indicators, random:N or solve")
    _add_solver_flags(p)
    return ap


def _run(args, out):
    if args.command == "solve":
        return cmd_solve(args.matrix, args.weights, args.rank, _config(args), args.out)
    if args.command == "reduce":
        return cmd_reduce(args.graph, args.kind, args.d, args.rank, args.out)
    if args.command == "biclique":
        return cmd_biclique(args.graph, args.mode)
    if args.command == "landscape":
        return cmd_landscape(args.matrix, args.weights, args.grid, args.out)
    return cmd_verify(args.instance, args.eps, args.candidates, _config(args), stream=out)


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        rep = _run(args, out)
    except (CapacityError, DegenerateInputError) as exc:
        print(f"wlra {args.command}: {exc}", file=err)
        rep = RunReport(args.command, summary={"error": str(exc)}, exit_code=EXIT_CAPACITY)
    except (WLRAError, ValueError, OSError) as exc:
        print(f"wlra {args.command}: {exc}", file=err)
        rep = RunReport(args.command, summary={"error": str(exc)}, exit_code=EXIT_INPUT)
    else:
        for key, val in rep.summary.items():
            print(f"{key}: {json.dumps(val)}", file=out)
    if args.report:
        Path(args.report).write_text(rep.to_json() + "\n")
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
