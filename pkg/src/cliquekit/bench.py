"""Runtime benchmarks over seeded random graphs."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass

from .bpso import BpsoParams
from .graph import Graph, random_graph
from .rng import substream
from .solvers import ORACLE_GUARD, solve_clique

BENCH_COLUMNS = ("n", "density", "seed", "algo", "seconds", "weight")


@dataclass(frozen=True)
class BenchRow:
    n: int
    density: float
    seed: int
    algo: str
    seconds: float
    weight: float

    def as_list(self) -> list:
        return [self.n, self.density, self.seed, self.algo, self.seconds, self.weight]


def bench_graph(n: int, density: float, seed: int) -> Graph:
    """Real weights on (0, 10]; stream ``substream(seed, "bench", n, repr(density))``."""
    return random_graph(n, density, substream(seed, "bench", n, repr(float(density))), "real")


def time_solve(
    g: Graph, algo: str, repeats: int = 1, params: BpsoParams | None = None, guard: int | None = ORACLE_GUARD
):
    """Best-of-``repeats`` wall time and the solver result."""
    best_t, res = float("inf"), None
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        res = solve_clique(g, algo, params=params, guard=guard)
        best_t = min(best_t, time.perf_counter() - t0)
    return best_t, res


def bench_cell(args: tuple) -> BenchRow:
    n, density, seed, algo, repeats, params, guard = args
    g = bench_graph(n, density, seed)
    t, res = time_solve(g, algo, repeats, params, guard)
    return BenchRow(n, float(density), seed, algo, t, res.weight)


def median_time(algo: str, n: int, density: float, seeds, repeats: int = 1) -> float:
    return statistics.median(
        bench_cell((n, density, s, algo, repeats, None, ORACLE_GUARD)).seconds for s in seeds
    )


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        w.writerow(r.as_list())
    return buf.getvalue()
