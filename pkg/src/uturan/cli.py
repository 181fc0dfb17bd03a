"""Command line harness.

Every output embeds the tool version, the command, the resolved config and
the seed, so replaying the config reproduces the file byte for byte.

Exit codes: 0 success, 2 property violation, 3 cap exceeded, 4 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from . import __version__
from .comb_utils import (fisgra_search, imo_split, linear_packing, monochromatic_subset,
                         monotone_subsequence)
from .constructions import (GridVertexMap, random_linear_candidate, split_construction_14,
                            split_construction_pi, splitpi_pairs, split14_pairs)
from .descriptive import enumerate_sequences, graph_admits, is_head_tail_mixing
from .errors import CapExceeded, GeneratorBug, InvalidQuery, StructureError
from .hypergraph import DensityQuery, RGraph, check_locally_dense, global_density
from .ordering import Ordering
from .ordersearch import DEFAULT_CAP
from .palettes import (Palette, conjecture_zero_predicate, derive_seed, f_free_trials, generate,
                       generation_properties, head_tail_palette, roles_palette)
from .palettes import density as palette_density
from .quasilinear import analyze_twins, is_consistent_graph
from .reduced import (ReducedGraph, blowup, constituent_density, counterexample_k4,
                      homomorphism_exists, min_density)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VIOLATION, EXIT_CAP, EXIT_INPUT = 0, 2, 3, 4


class InputError(Exception):
    pass


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _read_json(path: str) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _load_graph(path: str, lenient: bool = False) -> RGraph:
    data = _read_json(path)
    if isinstance(data, dict) and "graph" in data:
        data = data["graph"]
    try:
        return RGraph.from_dict(data, lenient=lenient)
    except InvalidQuery as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_palette(args) -> Palette:
    if args.named:
        kind, _, r = args.named.partition(":")
        try:
            r = int(r)
        except ValueError:
            raise InputError(f"--named expects head-tail:R or roles:R, got {args.named!r}") from None
        if kind == "head-tail":
            return head_tail_palette(r)
        if kind == "roles":
            return roles_palette(r)
        raise InputError(f"unknown named palette {kind!r}")
    if not args.palette:
        raise InputError("give --palette FILE or --named head-tail:R|roles:R")
    data = _read_json(args.palette)
    try:
        return Palette.from_dict(data)
    except InvalidQuery as exc:
        raise InputError(f"{args.palette}: {exc}") from None


def _meta(args) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "threads", "func", "command_path")}
    return {
        "tool": "uturan",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "command": args.command_path,
        "config": config,
        "seed": args.seed,
    }


def _emit(args, payload: dict, rows: Optional[list[dict]] = None) -> None:
    """JSON document, or CSV rows preceded by ``#`` metadata lines."""
    meta = _meta(args)
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        fields = list(dict.fromkeys(k for row in rows for k in row))
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps({"meta": meta, **payload}, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _map(fn, jobs, threads: int):
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


# densify ---------------------------------------------------------------------

def _densify_trial(job):
    P, n, trial, seed, eps, samples, verify = job
    s = derive_seed(seed, trial)
    G, phi = generate(P, n, s)
    if verify:
        generation_properties(P, G, phi)
    rep = check_locally_dense(G, DensityQuery(palette_density(P), eps, "sampled", samples, s))
    return {
        "kind": "trial",
        "trial": trial,
        "seed": s,
        "n": n,
        "edges": len(G),
        "global_density": float(global_density(G)),
        "worst_local_density": float(rep.worst_density) if rep.worst_density is not None else "",
        "local_holds": rep.holds,
    }


def run_densify(args) -> int:
    P = _load_palette(args)
    eps = Fraction(args.eps)
    jobs = [(P, args.n, k, args.seed, eps, args.samples, args.verify) for k in range(args.trials)]
    rows = _map(_densify_trial, jobs, args.threads)
    dens = [r["global_density"] for r in rows]
    summary = {
        "kind": "summary",
        "trials": len(rows),
        "palette_density": _frac(palette_density(P)),
        "mean": statistics.fmean(dens) if dens else 0.0,
        "min": min(dens, default=0.0),
        "stddev": statistics.pstdev(dens) if dens else 0.0,
        "local_holds_fraction": sum(r["local_holds"] for r in rows) / len(rows) if rows else 0.0,
    }
    _emit(args, {"trials": rows, "summary": summary}, rows + [summary])
    return EXIT_OK


# check-f ---------------------------------------------------------------------

def run_check(args) -> int:
    H = _load_graph(args.input, args.lenient)
    cap = args.cap_override or DEFAULT_CAP
    warnings = []
    report: dict = {"r": H.r, "n": H.n, "edges": len(H)}
    twins = analyze_twins(H)
    report["quasi_linear"] = twins.quasi_linear
    if not twins.quasi_linear:
        report["violation"] = twins.violation
    if H.r >= 3:
        try:
            mix = is_head_tail_mixing(H, cap=cap, randomized=args.randomized, seed=args.seed)
            report["head_tail_mixing"] = mix.mixing
            report["head_tail_complete"] = mix.complete
            if mix.witness_ordering is not None:
                report["head_tail_witness"] = list(mix.witness_ordering)
            if not mix.complete:
                warnings.append("head-tail-mixing answer is from a budgeted search")
        except CapExceeded as exc:
            report["head_tail_mixing"] = None
            warnings.append(f"head-tail-mixing: {exc}")
    if twins.quasi_linear and H.r >= 3:
        try:
            cons = is_consistent_graph(H, cap=cap, allow_large=args.randomized, seed=args.seed)
            report["consistent"] = cons.consistent
            report["consistent_complete"] = cons.complete
            if cons.witness is not None:
                report["consistent_witness"] = list(cons.witness)
        except CapExceeded as exc:
            report["consistent"] = None
            warnings.append(f"consistency: {exc}")
        admitted = []
        for sigma in enumerate_sequences(H.r):
            try:
                order = graph_admits(H, sigma, cap=cap)
            except CapExceeded as exc:
                warnings.append(f"admission of {sigma}: {exc}")
                continue
            if order is not None:
                admitted.append({"sequence": str(sigma), "ordering": list(order)})
        report["admitted_sequences"] = admitted
    try:
        pred = conjecture_zero_predicate(H, cap=cap)
        report["constant_roles_ordering"] = list(pred.ordering) if pred.holds else None
        report["constant_roles"] = pred.holds
    except CapExceeded as exc:
        report["constant_roles"] = None
        warnings.append(f"constant-role predicate: {exc}")
    if args.palette or args.named:
        P = _load_palette(args)
        ff = f_free_trials(P, H, args.n, args.trials, args.seed)
        report["f_free_trials"] = {"n": args.n, "trials": ff.trials,
                                   "embeddings_found": ff.embeddings_found, "found_in": ff.found_in}
    report["warnings"] = warnings
    _emit(args, {"report": report})
    return EXIT_OK


# construct -------------------------------------------------------------------

def _parse_grid(text: str) -> GridVertexMap:
    try:
        m, d = (int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"--grid expects m,d, got {text!r}") from None
    return GridVertexMap(m, d)


def run_construct(args) -> int:
    payload: dict = {}
    if args.mode == "linear-candidate":
        if args.n is None or args.r is None:
            raise InputError("linear-candidate needs --n and --r")
        rep = random_linear_candidate(args.n, args.r, args.seed)
        G = rep.graph
        payload["stats"] = {"p": rep.p, "sampled_edges": rep.sampled_edges,
                            "removed_count": rep.removed_count, "kept_edges": len(G)}
    else:
        if not args.input:
            raise InputError(f"{args.mode} needs --in FILE")
        Hp = _load_graph(args.input, args.lenient)
        if args.mode == "split14":
            pairs = split14_pairs(Hp)
            G = split_construction_14(Hp)
        else:
            if not args.grid or not args.sigmas:
                raise InputError("splitpi needs --grid m,d and --sigmas")
            grid = _parse_grid(args.grid)
            sigmas = args.sigmas.split(",")
            pairs = splitpi_pairs(Hp, grid, sigmas)
            G = split_construction_pi(Hp, grid, sigmas)
        payload["provenance"] = [{"source": p.source, "edges": [list(p.first), list(p.second)]} for p in pairs]
    payload["graph"] = G.to_dict()
    _emit(args, payload)
    return EXIT_OK


# reduced ---------------------------------------------------------------------

def _load_reduced(path: str) -> ReducedGraph:
    data = _read_json(path)
    if isinstance(data, dict) and "reduced" in data:
        data = data["reduced"]
    try:
        return ReducedGraph.from_dict(data)
    except InvalidQuery as exc:
        raise InputError(f"{path}: {exc}") from None


def _density_summary(R: ReducedGraph) -> dict:
    dens = {",".join(map(str, t)): _frac(constituent_density(R, t)) for t in R.indices()}
    return {"k": R.k, "r": R.r, "min_density": _frac(min_density(R)), "constituent_densities": dens}


def run_reduced(args) -> int:
    if args.action == "blowup":
        R = blowup(_load_palette(args), args.k)
        _emit(args, {"reduced": R.to_dict(), "summary": _density_summary(R)})
    elif args.action == "counterexample":
        R = counterexample_k4(args.k)
        summary = _density_summary(R)
        summary["part_size"] = 2 ** args.k
        _emit(args, {"summary": summary})
    elif args.action == "density":
        _emit(args, {"summary": _density_summary(_load_reduced(args.input))})
    else:
        src = _load_reduced(args.src)
        dst = counterexample_k4(args.dst_counterexample) if args.dst_counterexample else _load_reduced(args.dst)
        res = homomorphism_exists(src, dst, heuristic=args.heuristic, monotone=args.monotone)
        hom = None
        if res.homomorphism is not None:
            hom = {
                "index_map": {str(i): j for i, j in res.homomorphism.index_map.items()},
                "vertex_map": [[list(p), v, w] for (p, v), w in sorted(res.homomorphism.vertex_map.items())],
            }
        _emit(args, {"homomorphism": hom, "complete": res.complete, "index_maps_tried": res.index_maps_tried})
    return EXIT_OK


# utils -----------------------------------------------------------------------

def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def run_utils(args) -> int:
    import random

    rng = random.Random(args.seed)
    out: dict = {}
    if args.action == "monotone":
        out["subsequence"] = monotone_subsequence(_ints(args.seq), args.t)
    elif args.action == "imo":
        sets = [_ints(s) for s in args.sets.split(";")]
        order = Ordering(_ints(args.order)) if args.order else None
        out["B"] = [sorted(b) for b in imo_split(sets, order)]
    elif args.action == "monochromatic":
        from itertools import combinations

        col = {e: rng.randrange(args.colors) for e in combinations(range(args.n), args.r)}
        found = monochromatic_subset(col, args.n, args.r, args.m)
        out["subset"] = list(found) if found else None
    elif args.action == "packing":
        res = linear_packing(range(args.size), args.r, args.seed, args.restarts)
        out.update(size=res.size, target=res.target, reached=res.reached,
                   family=[list(e) for e in res.family])
    else:
        from itertools import product

        pts = list(product(range(args.N), repeat=args.d))
        rng.shuffle(pts)
        found = fisgra_search(pts, args.N, args.d, args.k)
        out["order"] = [list(p) for p in pts]
        out["result"] = None if found is None else {
            "sets": [list(s) for s in found[0]], "axis": found[1].axis, "direction": found[1].direction}
    _emit(args, out)
    return EXIT_OK


# replay ----------------------------------------------------------------------

RUNNERS = {"densify": run_densify, "check-f": run_check, "construct": run_construct,
           "reduced": run_reduced, "utils": run_utils}


def _read_meta(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    if text.startswith("# "):
        text = text.splitlines()[0][2:]
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:1:{exc.colno + 2}: {exc.msg}") from None
    data = _read_json(path)
    if not isinstance(data, dict) or "meta" not in data:
        raise InputError(f"{path}: no embedded run metadata")
    return data["meta"]


def run_replay(args) -> int:
    meta = _read_meta(args.source)
    config = dict(meta.get("config", {}))
    if config.get("command") not in RUNNERS:
        raise InputError(f"{args.source}: unknown command {config.get('command')!r}")
    replay = argparse.Namespace(**config)
    replay.out, replay.threads = args.out, args.threads
    replay.command_path = meta.get("command", config["command"])
    return RUNNERS[config["command"]](replay)


# parser ----------------------------------------------------------------------

def _palette_args(p):
    p.add_argument("--palette", help="palette JSON file")
    p.add_argument("--named", help="head-tail:R or roles:R")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="uturan", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="output file (default stdout)")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--lenient", action="store_true", help="sort unsorted edges instead of rejecting")
    ap.add_argument("--cap-override", type=int, default=None,
                    help="exhaustive ordering-search cap per connected component")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("densify", help="palette trials: global and sampled local densities")
    _palette_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--eps", default="1/4")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--verify", action="store_true", help="re-check each generated graph")
    p.set_defaults(func=run_densify)

    p = sub.add_parser("check-f", help="structure report for a hypergraph file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--randomized", action="store_true", help="budgeted search above the cap")
    _palette_args(p)
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=run_check)

    p = sub.add_parser("construct", help="split constructions and random linear candidates")
    p.add_argument("--mode", choices=("split14", "splitpi", "linear-candidate"), required=True)
    p.add_argument("--in", dest="input")
    p.add_argument("--grid", help="m,d")
    p.add_argument("--sigmas", help="comma-separated sequences, one per axis")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.set_defaults(func=run_construct)

    p = sub.add_parser("reduced", help="reduced hypergraphs")
    rs = p.add_subparsers(dest="action", required=True)
    q = rs.add_parser("blowup")
    _palette_args(q)
    q.add_argument("--k", type=int, required=True)
    q = rs.add_parser("counterexample")
    q.add_argument("--k", type=int, required=True)
    q = rs.add_parser("density")
    q.add_argument("--in", dest="input", required=True)
    q = rs.add_parser("homomorphism")
    q.add_argument("--src", required=True)
    q.add_argument("--dst")
    q.add_argument("--dst-counterexample", type=int, metavar="K")
    q.add_argument("--heuristic", action="store_true")
    q.add_argument("--monotone", action="store_true", help="only increasing index maps")
    p.set_defaults(func=run_reduced)

    p = sub.add_parser("utils", help="small combinatorial searches")
    us = p.add_subparsers(dest="action", required=True)
    q = us.add_parser("monotone")
    q.add_argument("--seq", required=True)
    q.add_argument("--t", type=int, required=True)
    q = us.add_parser("imo")
    q.add_argument("--sets", required=True, help="e.g. '1,2;3,4'")
    q.add_argument("--order", help="comma-separated order of the union")
    q = us.add_parser("monochromatic", help="random colouring, then search")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--r", type=int, default=2)
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--colors", type=int, default=2)
    q = us.add_parser("packing")
    q.add_argument("--size", type=int, required=True)
    q.add_argument("--r", type=int, default=3)
    q.add_argument("--restarts", type=int, default=20)
    q = us.add_parser("fisgra", help="random order on {0..N-1}^d, then search")
    q.add_argument("--N", type=int, required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    p.set_defaults(func=run_utils)

    p = sub.add_parser("replay", help="re-run the config embedded in an output file")
    p.add_argument("source")
    p.set_defaults(func=run_replay)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    args.command_path = " ".join(x for x in (args.command, getattr(args, "action", None)) if x)
    try:
        return args.func(args)
    except GeneratorBug as exc:
        print(f"property violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InputError, InvalidQuery, StructureError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
