"""Maximum weight clique solvers.

All solvers return a :class:`SolveResult` whose vertex tuple is sorted. Ties
are broken towards the lowest vertex id (greedy) or the lexicographically
smallest sorted vertex tuple (exact and oracle).
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import GraphTooLarge, Infeasible
from .graph import Graph, bits_to_mask, is_clique, is_independent_set, iter_bits

if TYPE_CHECKING:
    from .bpso import BpsoParams

ALGORITHMS = ("exact", "greedy", "bpso", "oracle")
ORACLE_GUARD = 20

# Relative tolerance under which two clique weights count as tied.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SolveResult:
    vertices: tuple[int, ...]
    weight: float
    algorithm: str
    nodes: int = 0
    iterations: int = 0
    elapsed: float = field(default=0.0, compare=False)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return len(self.vertices)


def _tie_tol(w: float) -> float:
    return TIE_RTOL * abs(w)


def modified_weights(g: Graph, cand: np.ndarray | None = None) -> np.ndarray:
    """Neighbor weight sums restricted to ``cand`` (all vertices when None)."""
    w = np.asarray(g.weights)
    a = g.adjacency_matrix
    if cand is None:
        return a @ w
    return a[np.ix_(cand, cand)] @ w[cand]


def greedy_max_weight_clique(g: Graph) -> SolveResult:
    """Neighbor-weight greedy heuristic.

    While candidates remain, score every candidate by the summed weight of
    its neighbours inside the candidate set, add the best-scoring vertex to
    the clique (lowest id on ties) and shrink the candidates to its
    neighbourhood. Quadratic work per round; the result is a maximal clique.
    """
    start = time.perf_counter()
    cand = np.arange(g.n)
    chosen: list[int] = []
    rounds = 0
    while cand.size:
        rounds += 1
        score = modified_weights(g, cand)
        top = score.max()
        pick = int(cand[np.flatnonzero(score >= top - _tie_tol(top))[0]])
        chosen.append(pick)
        nbrs = g.adj[pick]
        cand = np.array([v for v in cand.tolist() if nbrs >> v & 1], dtype=np.intp)
    chosen.sort()
    return SolveResult(
        tuple(chosen),
        g.weight_of(chosen),
        "greedy",
        iterations=rounds,
        elapsed=time.perf_counter() - start,
    )


def _lex_better(cand: tuple[int, ...], best: tuple[int, ...] | None) -> bool:
    return best is None or cand < best


def exact_max_weight_clique(g: Graph, min_size: int | None = None) -> SolveResult:
    """Branch-and-bound maximum weight clique, optionally with ``|C| >= min_size``.

    Vertices are ranked once by non-increasing ``w(v) * (1 + deg(v))``. A node
    holds the current clique and a candidate bitset; its bound is the clique
    weight plus the candidate weight, and it is cut when that bound falls
    below the incumbent or when too few candidates remain to reach
    ``min_size``. The incumbent starts from the greedy solution. Among
    equal-weight optima the lexicographically smallest vertex tuple wins.

    Raises :class:`Infeasible` when ``min_size`` is given and no clique of
    that size exists.
    """
    start = time.perf_counter()
    if min_size is not None and min_size < 1:
        raise ValueError("min_size must be >= 1")
    k = 1 if min_size is None else min_size
    n = g.n
    w = g.weights
    order = sorted(range(n), key=lambda v: (-(w[v] * (1 + g.degree(v))), v))
    rank = {v: i for i, v in enumerate(order)}
    radj = [bits_to_mask(rank[u] for u in iter_bits(g.adj[v])) for v in order]
    rw = [w[v] for v in order]

    best_w = -math.inf
    best_set: tuple[int, ...] | None = None
    greedy = greedy_max_weight_clique(g)
    if greedy.size >= k:
        best_w, best_set = greedy.weight, greedy.vertices

    nodes = 0
    cur: list[int] = []

    def consider(cur_w: float) -> None:
        nonlocal best_w, best_set
        tol = _tie_tol(best_w) if best_set is not None else 0.0
        if cur_w > best_w + tol:
            best_w, best_set = cur_w, tuple(sorted(order[i] for i in cur))
        elif cur_w >= best_w - tol:
            key = tuple(sorted(order[i] for i in cur))
            if _lex_better(key, best_set):
                best_w, best_set = cur_w, key

    def expand(cur_w: float, cand: int, cand_w: float) -> None:
        nonlocal nodes
        nodes += 1
        if len(cur) >= k:
            consider(cur_w)
        remaining = cand.bit_count()
        while cand:
            if best_set is not None and cur_w + cand_w < best_w - _tie_tol(best_w):
                return
            if len(cur) + remaining < k:
                return
            low = cand & -cand
            i = low.bit_length() - 1
            cand ^= low
            cand_w -= rw[i]
            remaining -= 1
            sub = cand & radj[i]
            cur.append(i)
            expand(cur_w + rw[i], sub, math.fsum(rw[j] for j in iter_bits(sub)))
            cur.pop()

    limit = sys.getrecursionlimit()
    if n + 100 > limit:
        sys.setrecursionlimit(n + 100)
    expand(0.0, (1 << n) - 1, math.fsum(rw))

    if best_set is None:
        if min_size is not None:
            raise Infeasible(f"no clique of size >= {min_size}")
        best_set, best_w = (), 0.0
    return SolveResult(
        best_set,
        g.weight_of(best_set),
        "exact",
        nodes=nodes,
        elapsed=time.perf_counter() - start,
    )


def enumerate_maximal_cliques(g: Graph, guard: int | None = ORACLE_GUARD) -> list[tuple[int, ...]]:
    """All maximal cliques (Bron-Kerbosch with Tomita pivoting), each sorted.

    The output list is sorted. Raises :class:`GraphTooLarge` when
    ``g.n > guard``; pass ``guard=None`` to lift the limit.
    """
    if guard is not None and g.n > guard:
        raise GraphTooLarge(f"n={g.n} exceeds oracle guard {guard}")
    if g.n == 0:
        return []
    out: list[tuple[int, ...]] = []
    adj = g.adj

    def bk(r: list[int], p: int, x: int) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(iter_bits(p | x), key=lambda u: (p & adj[u]).bit_count())
        for v in iter_bits(p & ~adj[pivot]):
            r.append(v)
            bk(r, p & adj[v], x & adj[v])
            r.pop()
            p &= ~(1 << v)
            x |= 1 << v

    bk([], g.all_mask, 0)
    out.sort()
    return out


def oracle_max_weight_clique(
    g: Graph, min_size: int | None = None, guard: int | None = ORACLE_GUARD
) -> SolveResult:
    """Best maximal clique by exhaustive enumeration (ties: smallest tuple)."""
    start = time.perf_counter()
    k = 1 if min_size is None else min_size
    best: tuple[int, ...] | None = None
    best_w = -math.inf
    cliques = enumerate_maximal_cliques(g, guard)
    for c in cliques:
        if len(c) < k:
            continue
        cw = g.weight_of(c)
        if cw > best_w + _tie_tol(best_w if best is not None else 0.0):
            best, best_w = c, cw
        elif cw >= best_w - _tie_tol(best_w) and c < best:
            best, best_w = c, cw
    if best is None:
        if min_size is not None:
            raise Infeasible(f"no clique of size >= {min_size}")
        best, best_w = (), 0.0
    return SolveResult(
        best, g.weight_of(best), "oracle", nodes=len(cliques), elapsed=time.perf_counter() - start
    )


def solve_clique(
    g: Graph,
    algo: str = "exact",
    *,
    min_size: int | None = None,
    params: BpsoParams | None = None,
    guard: int | None = ORACLE_GUARD,
) -> SolveResult:
    """Dispatch to one of :data:`ALGORITHMS`.

    Heuristics ignore ``min_size`` while searching; if their clique is too
    small, :class:`Infeasible` is raised with a message saying so.
    """
    if algo == "exact":
        return exact_max_weight_clique(g, min_size)
    if algo == "oracle":
        return oracle_max_weight_clique(g, min_size, guard)
    if algo == "greedy":
        res = greedy_max_weight_clique(g)
    elif algo == "bpso":
        from .bpso import BpsoParams, bpso_max_weight_clique

        res = bpso_max_weight_clique(g, params or BpsoParams())
    else:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")
    if min_size is not None and res.size < min_size:
        raise Infeasible(f"{algo} heuristic found no clique of size >= {min_size}")
    return res


def max_weight_independent_set(
    g: Graph,
    min_size: int | None = None,
    algo: str = "exact",
    *,
    params: BpsoParams | None = None,
    guard: int | None = ORACLE_GUARD,
) -> SolveResult:
    """Maximum weight independent set, solved as a clique in the complement."""
    res = solve_clique(g.complement(), algo, min_size=min_size, params=params, guard=guard)
    if not is_independent_set(g, res.vertices):
        raise AssertionError("complement clique is not independent in the original graph")
    return res


def prune_dominated(g: Graph, lower_bound: float) -> tuple[Graph, list[int]]:
    """Drop every vertex whose own weight plus neighbour weight is below ``lower_bound``.

    Such a vertex cannot belong to any clique of weight >= ``lower_bound``.
    The comparison allows a relative slack of ``TIE_RTOL`` so that a clique
    whose weight equals the bound survives summation-order rounding.
    Returns the induced subgraph and ``kept`` with ``kept[i]`` the original
    id of pruned-graph vertex ``i`` (increasing).
    """
    closed = np.asarray(g.weights) + modified_weights(g) if g.n else np.zeros(0)
    cut = lower_bound - _tie_tol(lower_bound)
    kept = [v for v in range(g.n) if not closed[v] < cut]
    return g.subgraph(kept), kept


def verify_clique_result(g: Graph, res: SolveResult, min_size: int | None = None) -> None:
    """Assert the :class:`SolveResult` invariants on ``g``."""
    if not is_clique(g, res.vertices):
        raise AssertionError(f"{res.algorithm} returned a non-clique {res.vertices}")
    if not math.isclose(res.weight, g.weight_of(res.vertices), rel_tol=1e-9, abs_tol=1e-12):
        raise AssertionError("reported weight differs from member sum")
    if min_size is not None and res.size < min_size:
        raise AssertionError("clique smaller than requested minimum size")
