"""Command-line front end.

Subcommands: ``solve``, ``app {noma,ic,idnc,rfid,cran}``, ``simulate``,
``bench``, ``export-ip`` and ``oracle``.

Exit codes: 0 success, 2 unreadable input, 3 infeasible, 4 oracle guard
exceeded, 5 a decoded answer failed its independent constraint check.

Apart from ``bench`` (which reports wall time), identical command lines
give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .apps import coding, cran, noma, rfid
from .bench import bench_cell, rows_to_csv
from .bpso import BpsoParams
from .errors import ConstraintViolation, DimacsError, FilesTooMany, GraphError, GraphTooLarge, Infeasible
from .ip import bnb_solve_binary, emit_lp_text, export_edge_formulation
from .rng import derive_seed
from .scenario import ScenarioError, load_graph, load_scenario, load_scenario_text
from .solvers import ALGORITHMS, ORACLE_GUARD, enumerate_maximal_cliques, solve_clique, verify_clique_result

EXIT_PARSE, EXIT_INFEASIBLE, EXIT_GUARD, EXIT_CHECK = 2, 3, 4, 5


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# --- output ----------------------------------------------------------------


def _scalar(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _render_text(report: dict, indent: str = "") -> list[str]:
    lines = []
    for key, val in report.items():
        if isinstance(val, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_render_text(val, indent + "  "))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            cols = list(val[0])
            lines.append(f"{indent}{key}:")
            lines.append(indent + "  " + "\t".join(cols))
            for row in val:
                lines.append(indent + "  " + "\t".join(_cell(row[c]) for c in cols))
        elif isinstance(val, list):
            lines.append(f"{indent}{key}: " + " ".join(_cell(v) for v in val))
        else:
            lines.append(f"{indent}{key}: {_scalar(val)}")
    return lines


def _cell(v) -> str:
    if isinstance(v, list):
        return "{" + ",".join(_cell(x) for x in v) + "}"
    return _scalar(v)


def format_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True) + "\n"
    return "\n".join(_render_text(report)) + "\n"


# --- helpers -----------------------------------------------------------------


def _guard(args) -> int:
    return ORACLE_GUARD if args.guard_override is None else args.guard_override


def _bpso_params(args, seed: int | None = None) -> BpsoParams:
    return BpsoParams(
        particles=args.particles,
        iterations=args.iterations,
        seed=args.seed if seed is None else seed,
    )


def _solver_kw(args) -> dict:
    return {"params": _bpso_params(args), "guard": _guard(args)}


def _clique_report(res, labels=None) -> dict:
    out = {
        "algorithm": res.algorithm,
        "vertices": list(res.vertices),
        "weight": res.weight,
        "size": len(res.vertices),
        "nodes": res.nodes,
        "iterations": res.iterations,
    }
    if labels is not None:
        out["labels"] = labels
    return out


def _ids(xs) -> list[int]:
    return [int(x) + 1 for x in sorted(xs)]


# --- solve -------------------------------------------------------------------


def cmd_solve(args) -> dict:
    g = load_graph(args.graph)
    res = solve_clique(g, args.algo, min_size=args.min_size, **_solver_kw(args))
    verify_clique_result(g, res, args.min_size)
    return {"command": "solve", "n": g.n, "edges": g.num_edges, **_clique_report(res)}


# --- app ---------------------------------------------------------------------


def _app_noma(s: noma.NomaScenario, args) -> tuple:
    a = noma.solve_max_access(s, args.algo, **_solver_kw(args))
    noma.check_noma_assignment(s, a)
    _, mapping = noma.build_noma_graph(s)
    labels = [f"{{{','.join(str(u + 1) for u in q)}}}@{k + 1}" for q, k in mapping.decode(a.raw.vertices)]
    clusters = [
        {
            "channel": k + 1,
            "users": _ids(q),
            "rates": [noma.noma_rate(s, q, k, u) for u in q],
        }
        for q, k in a.clusters
    ]
    return a.raw, labels, {"admitted": a.count, "clusters": clusters}


def _app_ic(si: coding.SideInformation, args) -> tuple:
    c = coding.ic_solve(si, args.algo, **_solver_kw(args))
    coding.check_ic_combination(si, c.files)
    labels = [str(f + 1) for f in sorted(c.raw.vertices)]
    return c.raw, labels, {"combination": _ids(c.files), "size": len(c.files), "targeted": _ids(c.targeted)}


def _app_idnc(si: coding.SideInformation, args) -> tuple:
    c = coding.idnc_solve(si, args.algo, **_solver_kw(args))
    coding.check_idnc_combination(si, c)
    _, mapping = coding.idnc_build_graph(si)
    labels = [f"{u + 1},{f + 1}" for u, f in mapping.decode(c.raw.vertices)]
    answer = {"combination": _ids(c.files), "targeted": _ids(c.targeted), "objective": c.objective}
    return c.raw, labels, answer


def _app_rfid(s: rfid.RfidScenario, args) -> tuple:
    plan = rfid.solve_rccaa(s, args.algo, **_solver_kw(args))
    rfid.check_rfid_plan(s, plan)
    labels = [f"{r + 1},{d + 1}" for r, d in plan.activation]
    rows = [{"reader": r + 1, "level": d + 1, "tags": _ids(s.coverage[r][d])} for r, d in plan.activation]
    return plan.raw, labels, {"covered": len(plan.covered(s)), "activation": rows}


def _app_cran(s: cran.CranScenario, args) -> tuple:
    if args.levels is None:
        sched = cran.solve_schedule(s, args.algo, **_solver_kw(args))
        _, mapping = cran.build_scheduling_graph(s)
        labels = [f"{u + 1},{b + 1},{r + 1}" for u, b, r in mapping.decode(sched.raw.vertices)]
        mode = "fixed"
    else:
        sched = cran.solve_joint(s, args.algo, args.levels, **_solver_kw(args))
        _, mapping = cran.build_joint_graph(s, args.levels)
        labels = [
            f"{r + 1}:" + ",".join(str(u + 1) for u in users)
            for r, users, _ in mapping.decode(sched.raw.vertices)
        ]
        mode = "joint"
    cran.check_schedule(s, sched)
    rows = [
        {"rrh": b + 1, "rrb": r + 1, "user": u + 1, "power": p, "rate": rate}
        for b, r, u, p, rate in sched.rows(s)
    ]
    return sched.raw, labels, {"mode": mode, "objective": sched.objective, "schedule": rows}


_APPS = {"noma": _app_noma, "ic": _app_ic, "idnc": _app_idnc, "rfid": _app_rfid, "cran": _app_cran}


def cmd_app(args) -> dict:
    sf = load_scenario(args.scenario)
    if sf.kind != args.kind and not {sf.kind, args.kind} <= {"ic", "idnc"}:
        raise _Exit(EXIT_PARSE, f"scenario kind {sf.kind!r} does not match app {args.kind!r}")
    raw, labels, answer = _APPS[args.kind](sf.data, args)
    return {
        "command": "app",
        "kind": args.kind,
        "clique": _clique_report(raw, labels),
        "answer": answer,
        "check": "ok",
    }


# --- simulate ----------------------------------------------------------------


def _replica(job: tuple):
    r, rseed, si, gen, algo, coding_on, particles, iterations, max_slots = job
    if gen is not None and "p_has" not in gen:
        si = coding.initial_broadcast(si.n_users, si.n_files, si.erasure, rseed)
    params = BpsoParams(particles=particles, iterations=iterations)
    return r, rseed, coding.simulate_broadcast(
        si, algo, rseed, coding=coding_on, max_slots=max_slots, params=params
    )


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("CLIQUEKIT_THREADS", "1")))
    except ValueError:
        return 1


def _run_jobs(fn, jobs: list) -> list:
    """Run ``fn`` over ``jobs`` on up to CLIQUEKIT_THREADS processes; results keep job order."""
    n = min(_workers(), len(jobs))
    if n <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, jobs))


def cmd_simulate(args) -> dict:
    sf = load_scenario(args.scenario)
    if sf.kind not in ("idnc", "ic"):
        raise _Exit(EXIT_PARSE, "simulate needs an idnc or ic scenario")
    if args.replicas < 1:
        raise _Exit(EXIT_PARSE, "replicas must be >= 1")
    si = sf.data
    jobs = [
        (r, derive_seed(args.seed, "replica", r), si, sf.generator, args.algo, not args.no_coding,
         args.particles, args.iterations, args.max_slots)
        for r in range(args.replicas)
    ]
    results = _run_jobs(_replica, jobs)
    per = [
        {"replica": r, "seed": rseed, "completion": rec.completion_time, "delay": rec.total_delay}
        for r, rseed, rec in results
    ]
    comp = np.array([p["completion"] for p in per], dtype=float)
    delay = np.array([p["delay"] for p in per], dtype=float)
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["replica", "slot", "combination", "targeted", "successes", "cum_delay"])
        for r, _, rec in results:
            for row in rec.csv_rows():
                w.writerow([r, *row])
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    return {
        "command": "simulate",
        "algorithm": args.algo if not args.no_coding else "uncoded",
        "replicas": per,
        "completion_mean": float(comp.mean()),
        "completion_std": float(comp.std(ddof=1)) if len(comp) > 1 else 0.0,
        "delay_mean": float(delay.mean()),
        "delay_std": float(delay.std(ddof=1)) if len(delay) > 1 else 0.0,
    }


# --- bench -------------------------------------------------------------------


def _csv_list(text: str, cast) -> list:
    try:
        return [cast(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad list {text!r}") from None


def cmd_bench(args) -> str:
    algos = _csv_list(args.algos, str)
    for a in algos:
        if a not in ALGORITHMS:
            raise _Exit(EXIT_PARSE, f"unknown algorithm {a!r}")
    seeds = range(args.seed, args.seed + args.seeds)
    params = _bpso_params(args)
    jobs = [
        (n, d, s, a, args.repeats, params, _guard(args))
        for n in _csv_list(args.sizes, int)
        for d in _csv_list(args.densities, float)
        for s in seeds
        for a in algos
    ]
    rows = _run_jobs(bench_cell, jobs)
    text = rows_to_csv(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if args.format == "json":
        return json.dumps([dict(zip(("n", "density", "seed", "algo", "seconds", "weight"), r.as_list()))
                           for r in rows], sort_keys=True) + "\n"
    return text


# --- export-ip ---------------------------------------------------------------


def cmd_export_ip(args) -> dict:
    g = load_graph(args.graph)
    prog = export_edge_formulation(g, args.min_size)
    lp = emit_lp_text(prog)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(lp)
    report = {
        "command": "export-ip",
        "variables": prog.num_vars,
        "constraints": len(prog.constraints),
    }
    try:
        sol = bnb_solve_binary(prog)
    except Infeasible:
        report.update(status="infeasible")
    else:
        report.update(
            status="optimal",
            value=sol.value,
            vertices=[i for i, x in enumerate(sol.x) if x],
            nodes=sol.nodes,
        )
    if not args.out:
        report["lp"] = lp
    return report


# --- oracle ------------------------------------------------------------------


def cmd_oracle(args) -> dict:
    with open(args.input, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        sf = load_scenario_text(text)
        if sf.kind in ("ic", "idnc"):
            c = coding.oracle_best_combination(sf.data, _guard(args))
            return {
                "command": "oracle",
                "combination": _ids(c.files),
                "targeted": _ids(c.targeted),
                "objective": c.objective,
            }
        if sf.kind != "graph":
            raise _Exit(EXIT_PARSE, f"oracle handles graph, ic and idnc inputs, not {sf.kind!r}")
        g = sf.data
    else:
        g = load_graph(args.input)
    cliques = enumerate_maximal_cliques(g, _guard(args))
    res = solve_clique(g, "oracle", min_size=args.min_size, guard=_guard(args))
    return {
        "command": "oracle",
        "maximal_cliques": [list(c) for c in cliques],
        "count": len(cliques),
        **_clique_report(res),
    }


# --- parser ------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--csv", metavar="PATH", help="write CSV output here")
    p.add_argument("--algo", choices=ALGORITHMS, default="exact")
    p.add_argument("--min-size", type=int, default=None, help="only cliques with at least this many vertices")
    p.add_argument("--guard-override", type=int, default=None, metavar="N",
                   help=f"oracle size guard (default {ORACLE_GUARD})")
    p.add_argument("--particles", type=int, default=20, help="BPSO swarm size")
    p.add_argument("--iterations", type=int, default=100, help="BPSO iterations")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="cliquekit", description=__doc__.split("\n")[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="maximum weight clique of a graph file")
    p.add_argument("graph", help="DIMACS file or JSON graph scenario")

    p = sub.add_parser("app", parents=[common], help="solve an application scenario")
    p.add_argument("kind", choices=sorted(_APPS))
    p.add_argument("scenario")
    p.add_argument("--levels", type=int, default=None,
                   help="cran only: power levels per RRH; enables joint power control")

    p = sub.add_parser("simulate", parents=[common], help="IDNC broadcast over erasure channels")
    p.add_argument("scenario")
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--no-coding", action="store_true", help="send the best single file each slot")
    p.add_argument("--max-slots", type=int, default=100_000)

    p = sub.add_parser("bench", parents=[common], help="time solvers on random graphs")
    p.add_argument("--sizes", default="10,20,40")
    p.add_argument("--densities", default="0.5")
    p.add_argument("--seeds", type=int, default=5, help="number of seeds, starting at --seed")
    p.add_argument("--algos", default="exact,greedy")
    p.add_argument("--repeats", type=int, default=1, help="best-of repeats per cell")

    p = sub.add_parser("export-ip", parents=[common], help="write the edge formulation as LP text")
    p.add_argument("graph")
    p.add_argument("--out", "-o", metavar="PATH", help="LP file (default: include in report)")

    p = sub.add_parser("oracle", parents=[common], help="exhaustive reference answer")
    p.add_argument("input", help="DIMACS file, or JSON graph / ic / idnc scenario")
    return parser


_COMMANDS = {
    "solve": cmd_solve,
    "app": cmd_app,
    "simulate": cmd_simulate,
    "bench": cmd_bench,
    "export-ip": cmd_export_ip,
    "oracle": cmd_oracle,
}


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = args.format
    try:
        result = _COMMANDS[args.command](args)
    except _Exit as exc:
        print(f"error: {exc}", file=err)
        return exc.code
    except Infeasible as exc:
        out.write(format_report({"command": args.command, "status": "infeasible", "reason": str(exc)}, fmt))
        return EXIT_INFEASIBLE
    except (GraphTooLarge, FilesTooMany) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_GUARD
    except ConstraintViolation as exc:
        print(f"constraint check failed: {exc}", file=err)
        return EXIT_CHECK
    except (ScenarioError, DimacsError, GraphError, ValueError, OSError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE
    out.write(result if isinstance(result, str) else format_report(result, fmt))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
