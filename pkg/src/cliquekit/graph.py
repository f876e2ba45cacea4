"""Undirected vertex-weighted graphs with bitmask adjacency.

Vertices are dense ids ``0..n-1``. Neighborhoods are stored as Python ints
used as bitsets, so ``adj[v] >> u & 1`` tests the edge ``(u, v)``.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimacsError, GraphError


def iter_bits(mask: int) -> Iterator[int]:
    """Yield set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


class Graph:
    """Immutable simple graph with positive vertex weights.

    Use :func:`build_graph` rather than calling the constructor with raw
    masks; the constructor trusts its input.
    """

    def __init__(self, n: int, adj: Sequence[int], weights: Sequence[float]):
        self.n = n
        self.adj = tuple(adj)
        self.weights = tuple(float(w) for w in weights)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj and self.weights == other.weights

    def __hash__(self) -> int:
        return hash((self.n, self.adj, self.weights))

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def num_edges(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return list(iter_bits(self.adj[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        """Sorted list of edges ``(i, j)`` with ``i < j``."""
        out = []
        for i in range(self.n):
            for j in iter_bits(self.adj[i] >> (i + 1)):
                out.append((i, i + 1 + j))
        return out

    def weight_of(self, vertices: Iterable[int]) -> float:
        return math.fsum(self.weights[v] for v in vertices)

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.float64)
        for i, j in self.edges():
            a[i, j] = a[j, i] = 1.0
        a.flags.writeable = False
        return a

    def complement(self) -> Graph:
        full = self.all_mask
        adj = [(full & ~a) & ~(1 << v) for v, a in enumerate(self.adj)]
        return Graph(self.n, adj, self.weights)

    def subgraph(self, keep: Sequence[int]) -> Graph:
        """Induced subgraph on ``keep`` (relabelled 0..len(keep)-1 in the given order)."""
        index = {v: i for i, v in enumerate(keep)}
        adj = []
        for v in keep:
            adj.append(bits_to_mask(index[u] for u in iter_bits(self.adj[v]) if u in index))
        return Graph(len(keep), adj, [self.weights[v] for v in keep])

    def with_weights(self, weights: Sequence[float]) -> Graph:
        _check_weights(self.n, weights, allow_zero=False)
        return Graph(self.n, self.adj, weights)


def _check_weights(n: int, weights: Sequence[float], allow_zero: bool) -> None:
    if len(weights) != n:
        raise GraphError(f"expected {n} weights, got {len(weights)}")
    for v, w in enumerate(weights):
        if not math.isfinite(w):
            raise GraphError(f"weight of vertex {v} is not finite: {w}")
        if w < 0 or (w == 0 and not allow_zero):
            raise GraphError(f"weight of vertex {v} must be positive, got {w}")


def build_graph(
    n: int,
    edges: Iterable[tuple[int, int]] = (),
    weights: Sequence[float] | None = None,
    *,
    allow_zero: bool = False,
) -> Graph:
    """Build a simple undirected graph.

    Duplicate edges are collapsed; self-loops and out-of-range ids raise
    :class:`GraphError`. Weights default to 1.0. Zero weights are rejected
    unless ``allow_zero`` is set (application reducers use it for
    associations whose utility is exactly zero).
    """
    if n < 0:
        raise GraphError("vertex count must be non-negative")
    weights = [1.0] * n if weights is None else [float(w) for w in weights]
    _check_weights(n, weights, allow_zero)
    adj = [0] * n
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise GraphError(f"self-loop at vertex {i}")
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    return Graph(n, adj, weights)


def complete_graph(n: int, weights: Sequence[float] | None = None) -> Graph:
    return build_graph(n, ((i, j) for i in range(n) for j in range(i + 1, n)), weights)


def random_graph(
    n: int,
    density: float,
    rng: np.random.Generator,
    weights: str | Sequence[float] = "unit",
) -> Graph:
    """G(n, p) graph. ``weights`` is ``"unit"``, ``"real"`` (uniform on (0, 10]),
    ``"int"`` (uniform on 1..10) or an explicit sequence."""
    upper = rng.random((n, n)) < density
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if upper[i, j]]
    if isinstance(weights, str):
        if weights == "unit":
            w = [1.0] * n
        elif weights == "real":
            w = list(10.0 - 10.0 * rng.random(n))  # (0, 10]
        elif weights == "int":
            w = [float(x) for x in rng.integers(1, 11, size=n)]
        else:
            raise ValueError(f"unknown weight scheme {weights!r}")
    else:
        w = list(weights)
    return build_graph(n, edges, w)


def _check_members(g: Graph, s: Iterable[int]) -> list[int]:
    members = list(s)
    for v in members:
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} out of range for n={g.n}")
    return members


def is_clique(g: Graph, s: Iterable[int]) -> bool:
    members = _check_members(g, s)
    mask = bits_to_mask(members)
    return all((mask & ~(1 << v)) & ~g.adj[v] == 0 for v in members)


def is_independent_set(g: Graph, s: Iterable[int]) -> bool:
    members = _check_members(g, s)
    mask = bits_to_mask(members)
    return all(g.adj[v] & mask == 0 for v in members)


def is_maximal_clique(g: Graph, s: Iterable[int]) -> bool:
    members = _check_members(g, s)
    if not is_clique(g, members):
        return False
    common = g.all_mask & ~bits_to_mask(members)
    for v in members:
        common &= g.adj[v]
    return common == 0


# --- DIMACS ---------------------------------------------------------------


def parse_dimacs(text: str) -> Graph:
    """Parse DIMACS ascii clique format.

    Recognised lines: ``c`` comments, ``p edge n m`` (also ``p col``),
    ``e i j`` with 1-based ids, and ``n i w`` vertex weights.
    """
    n = None
    edges: list[tuple[int, int]] = []
    weights: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "p":
                if n is not None:
                    raise DimacsError(f"line {lineno}: duplicate problem line")
                if len(parts) != 4 or parts[1] not in ("edge", "col"):
                    raise DimacsError(f"line {lineno}: malformed header {line!r}")
                n = int(parts[2])
                int(parts[3])
                if n < 0:
                    raise DimacsError(f"line {lineno}: negative vertex count")
                continue
            if n is None:
                raise DimacsError(f"line {lineno}: data before 'p edge' header")
            if tag == "e":
                if len(parts) != 3:
                    raise DimacsError(f"line {lineno}: malformed edge line")
                i, j = int(parts[1]), int(parts[2])
                if not (1 <= i <= n and 1 <= j <= n):
                    raise DimacsError(f"line {lineno}: edge index out of range 1..{n}")
                if i == j:
                    raise DimacsError(f"line {lineno}: self-loop")
                edges.append((i - 1, j - 1))
            elif tag == "n":
                if len(parts) != 3:
                    raise DimacsError(f"line {lineno}: malformed weight line")
                i, w = int(parts[1]), float(parts[2])
                if not 1 <= i <= n:
                    raise DimacsError(f"line {lineno}: vertex index out of range 1..{n}")
                if i - 1 in weights:
                    raise DimacsError(f"line {lineno}: duplicate weight for vertex {i}")
                weights[i - 1] = w
            else:
                raise DimacsError(f"line {lineno}: unknown line type {tag!r}")
        except ValueError as exc:
            if isinstance(exc, DimacsError):
                raise
            raise DimacsError(f"line {lineno}: {exc}") from exc
    if n is None:
        raise DimacsError("missing 'p edge n m' header")
    w = [weights.get(v, 1.0) for v in range(n)]
    try:
        return build_graph(n, edges, w)
    except GraphError as exc:
        raise DimacsError(str(exc)) from exc


def emit_dimacs(g: Graph) -> str:
    edges = g.edges()
    lines = [f"p edge {g.n} {len(edges)}"]
    for v, w in enumerate(g.weights):
        if w != 1.0:
            lines.append(f"n {v + 1} {w!r}")
    lines.extend(f"e {i + 1} {j + 1}" for i, j in edges)
    return "\n".join(lines) + "\n"
