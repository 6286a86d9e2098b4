"""Command-line front end.

Subcommands: ``gen``, ``color``, ``verify``, ``exact``, ``sweep``.
Exit codes: 0 success, 1 verification negative, 2 structural or usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .complete import cf_color_complete, log_bound
from .edgecolor import misra_gries
from .exact import EdgeCapExceeded, SearchConfig, SearchLimitExceeded, exact_cf_index
from .graph import (
    Graph,
    GraphFormatError,
    complete_graph,
    degree_stats,
    gnp_random,
    near_regularity_gap,
    random_regular,
    read_graph,
    write_graph,
)
from .nearly_regular import PipelineConfig, color_nearly_regular_best, target_bound
from .verify import EdgeColoring, StructuralError, read_coloring, verify, write_coloring

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2
WORKERS_ENV = "CFCOLOR_WORKERS"
METHODS = ("complete", "nearly-regular", "fallback")
SWEEP_METHODS = METHODS + ("stats",)


class CliError(Exception):
    """Usage or structural problem; exit code 2."""


@dataclass
class ExperimentRecord:
    kind: str
    n: int
    param: float
    seed_index: int
    master_seed: int
    trial_seed: int
    method: str
    delta: int
    min_degree: int
    near_regularity_gap: int | str
    s: int | str
    colors_total: int | str
    bound_rhs: float | str
    delta_prime: int | str
    runtime_ms: float
    verified: bool | str

    @classmethod
    def header(cls) -> list[str]:
        return [f.name for f in fields(cls)]


# --- coloring -----------------------------------------------------------------

def is_complete(G: Graph) -> bool:
    return G.m == G.n * (G.n - 1) // 2


def run_method(G: Graph, method: str, seed: int = 0, profile: str = "scaled",
               restarts: int = 1, fallback: str = "vizing"):
    """``(coloring, report dict)`` for one method; raises on failed verification."""
    if method == "complete":
        if not is_complete(G):
            raise CliError(f"complete method needs a complete graph, got n={G.n} m={G.m}")
        if G.n < 2:
            raise CliError("complete method needs n >= 2")
        c = cf_color_complete(G.n)
        report = {"method": method, "n": G.n, "colors": {"total": len(c.palette)},
                  "bound": log_bound(G.n) + 1}
    elif method == "nearly-regular":
        cfg = PipelineConfig(seed=seed, profile=profile, fallback=fallback)
        c, rr = color_nearly_regular_best(G, cfg, restarts)
        report = {"method": method, **rr.to_dict(),
                  "bound": target_bound(rr.delta) if rr.delta >= 2 else None}
    elif method == "fallback":
        if G.m and (G.degrees == 0).any():
            raise StructuralError("graph has isolated vertices")
        c = EdgeColoring(misra_gries(G))
        delta = int(G.degrees.max()) if G.n else 0
        report = {"method": method, "colors": {"total": len(c.palette)}, "bound": delta + 1}
    else:
        raise CliError(f"unknown method {method!r}")
    rep = verify(G, c, "closed")
    report["verified"] = rep.conflict_free
    if not rep.conflict_free:
        raise RuntimeError(f"{method}: {len(rep.unsatisfied)} unsatisfied edges")
    return c, report


def roundtrip_verify(G: Graph, c: EdgeColoring, path: Path) -> bool:
    """Write ``c`` to ``path``, read it back and verify (closed)."""
    write_coloring(G, c, path)
    back = read_coloring(G, path)
    return back == c and verify(G, back, "closed").conflict_free


# --- sweep ----------------------------------------------------------------------

def trial_seed(master: int, *key: int) -> int:
    return int(np.random.SeedSequence([master, *key]).generate_state(1, dtype=np.uint32)[0])


def make_instance(kind: str, n: int, param: float, seed: int) -> Graph:
    if kind == "complete":
        return complete_graph(n)
    if kind == "gnp":
        return gnp_random(n, param, seed)
    if kind == "regular":
        return random_regular(n, int(param), seed)
    raise CliError(f"unknown kind {kind!r}")


def _run_trial(task) -> ExperimentRecord:
    kind, n, param, idx, master, seed, method, profile, restarts, workdir = task
    try:
        G = make_instance(kind, n, param, seed)
        t0 = time.perf_counter()
        st = degree_stats(G)
        delta = st.max_degree
        gap = near_regularity_gap(G) if delta >= 2 else ""
        s = colors = dprime = bound = ""
        verified: bool | str = ""
        if method != "stats":
            c, rep = run_method(G, method, seed, profile, restarts)
            colors = rep["colors"]["total"]
            bound = rep.get("bound") if rep.get("bound") is not None else ""
            s = rep.get("s", "")
            dprime = rep.get("delta_prime", "")
            path = Path(workdir) / f"{kind}-{n}-{param}-{idx}.col"
            verified = roundtrip_verify(G, c, path)
            if not verified:
                raise RuntimeError("coloring failed to re-verify from disk")
        elif delta >= 2:
            bound = target_bound(delta)
        ms = (time.perf_counter() - t0) * 1000
    except Exception as exc:
        raise RuntimeError(f"trial kind={kind} n={n} param={param} seed_index={idx} seed={seed}: {exc}") from exc
    return ExperimentRecord(kind, n, param, idx, master, seed, method, delta, st.min_degree,
                            gap, s, colors, bound, dprime, round(ms, 3), verified)


def sweep(kind: str, ns, params, seeds: int, method: str, master: int = 0, profile: str = "scaled",
          restarts: int = 1, workers: int = 1, workdir: str | None = None) -> list[ExperimentRecord]:
    """One record per (n, param, seed index), in that canonical order."""
    if method not in SWEEP_METHODS:
        raise CliError(f"unknown sweep method {method!r}")
    params = list(params) if kind != "complete" else [0]
    tmp = None
    if workdir is None:
        tmp = tempfile.TemporaryDirectory()
        workdir = tmp.name
    tasks = [
        (kind, int(n), float(p), i, master, trial_seed(master, int(n), pi, i), method, profile, restarts, workdir)
        for n in ns
        for pi, p in enumerate(params)
        for i in range(seeds)
    ]
    try:
        if workers <= 1 or len(tasks) <= 1:
            return [_run_trial(t) for t in tasks]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_trial, tasks))
    finally:
        if tmp is not None:
            tmp.cleanup()


def write_records(records, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(ExperimentRecord.header())
    for r in records:
        w.writerow([getattr(r, k) for k in ExperimentRecord.header()])


# --- argument parsing ---------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    """``"2..64"`` or ``"256,512"`` (empty string gives an empty list)."""
    out = []
    for part in filter(None, text.split(",")):
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _float_list(text: str) -> list[float]:
    return [float(x) for x in filter(None, text.split(","))]


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"{WORKERS_ENV} must be an integer, got {raw!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cfcolor", description="Conflict-free edge coloring tools.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a graph file")
    g.add_argument("kind", choices=("complete", "gnp", "regular"))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float)
    g.add_argument("--d", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    c = sub.add_parser("color", help="color a graph and verify the result")
    c.add_argument("method", choices=METHODS)
    c.add_argument("graph")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--profile", choices=("paper", "scaled"), default="scaled")
    c.add_argument("--restarts", type=int, default=1)
    c.add_argument("--fallback", choices=("vizing", "greedy", "matching"), default="vizing")
    c.add_argument("--out", required=True, help="coloring file")
    c.add_argument("--report", help="JSON report path (stdout if omitted)")

    v = sub.add_parser("verify", help="check a coloring")
    v.add_argument("graph")
    v.add_argument("coloring")
    v.add_argument("--mode", choices=("closed", "open"), default="closed")

    e = sub.add_parser("exact", help="exact conflict-free chromatic index")
    e.add_argument("graph")
    e.add_argument("--mode", choices=("closed", "open"), default="closed")
    e.add_argument("--budget", type=int, default=SearchConfig.node_limit, help="search node limit")
    e.add_argument("--max-edges", type=int, default=SearchConfig.max_edges)

    s = sub.add_parser("sweep", help="run an experiment grid and write CSV")
    s.add_argument("kind", choices=("complete", "gnp", "regular"))
    s.add_argument("--n", type=_int_list, required=True, help="e.g. 2..64 or 256,512")
    s.add_argument("--p", type=_float_list, default=[], help="edge probabilities (gnp)")
    s.add_argument("--d", type=_float_list, default=[], help="degrees (regular)")
    s.add_argument("--seeds", type=int, default=1)
    s.add_argument("--method", choices=SWEEP_METHODS, default="nearly-regular")
    s.add_argument("--seed", type=int, default=0, help="master seed")
    s.add_argument("--profile", choices=("paper", "scaled"), default="scaled")
    s.add_argument("--restarts", type=int, default=1)
    s.add_argument("--workers", type=int)
    s.add_argument("--out", help="CSV path (stdout if omitted)")
    return p


def _cmd_gen(a) -> int:
    if a.kind == "gnp":
        if a.p is None:
            raise CliError("gen gnp needs --p")
        G = gnp_random(a.n, a.p, a.seed)
    elif a.kind == "regular":
        if a.d is None:
            raise CliError("gen regular needs --d")
        G = random_regular(a.n, a.d, a.seed)
    else:
        G = complete_graph(a.n)
    write_graph(G, a.out)
    print(json.dumps({"n": G.n, "m": G.m, "out": a.out}))
    return EXIT_OK


def _cmd_color(a) -> int:
    G = read_graph(a.graph)
    try:
        c, report = run_method(G, a.method, a.seed, a.profile, a.restarts, a.fallback)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    ok = roundtrip_verify(G, c, Path(a.out))
    report["verified"] = ok
    text = json.dumps(report, indent=2, sort_keys=True)
    if a.report:
        Path(a.report).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _cmd_verify(a) -> int:
    G = read_graph(a.graph)
    c = read_coloring(G, a.coloring)
    rep = verify(G, c, a.mode)
    print(rep.to_json())
    return EXIT_OK if rep.conflict_free else EXIT_NEGATIVE


def _cmd_exact(a) -> int:
    G = read_graph(a.graph)
    cfg = SearchConfig(node_limit=a.budget, mode=a.mode, max_edges=a.max_edges)
    try:
        q = exact_cf_index(G, a.mode, cfg)
    except SearchLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    print(json.dumps({"mode": a.mode, "n": G.n, "m": G.m, "index": q}))
    return EXIT_OK


def _cmd_sweep(a) -> int:
    params = a.p if a.kind == "gnp" else a.d
    if a.kind != "complete" and not params and a.n:
        raise CliError(f"sweep {a.kind} needs --{'p' if a.kind == 'gnp' else 'd'}")
    workers = a.workers if a.workers is not None else default_workers()
    records = sweep(a.kind, a.n, params, a.seeds, a.method, a.seed, a.profile, a.restarts, workers)
    if a.out:
        with open(a.out, "w", newline="") as fh:
            write_records(records, fh)
    else:
        write_records(records, sys.stdout)
    return EXIT_OK


COMMANDS = {"gen": _cmd_gen, "color": _cmd_color, "verify": _cmd_verify, "exact": _cmd_exact, "sweep": _cmd_sweep}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.cmd](args)
    except (CliError, StructuralError, GraphFormatError, EdgeCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
