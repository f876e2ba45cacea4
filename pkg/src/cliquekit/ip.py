"""0-1 integer programs: edge formulation export, binary branch-and-bound, LP text."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import Infeasible
from .graph import Graph

RELATIONS = ("<=", ">=", "=")
_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class Constraint:
    coefs: tuple[float, ...]
    relation: str
    rhs: float
    name: str = ""

    def satisfied(self, x) -> bool:
        lhs = math.fsum(a * xi for a, xi in zip(self.coefs, x))
        if self.relation == "<=":
            return lhs <= self.rhs + _FEAS_TOL
        if self.relation == ">=":
            return lhs >= self.rhs - _FEAS_TOL
        return abs(lhs - self.rhs) <= _FEAS_TOL


@dataclass(frozen=True)
class BinaryProgram:
    """``max c.x`` over ``x in {0,1}^n`` subject to linear constraints."""

    objective: tuple[float, ...]
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self):
        n = len(self.objective)
        for c in self.constraints:
            if len(c.coefs) != n:
                raise ValueError(f"constraint {c.name or c} has {len(c.coefs)} coefficients, expected {n}")
            if c.relation not in RELATIONS:
                raise ValueError(f"unknown relation {c.relation!r}")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def value(self, x) -> float:
        return math.fsum(c * xi for c, xi in zip(self.objective, x))

    def feasible(self, x) -> bool:
        return all(c.satisfied(x) for c in self.constraints)


@dataclass(frozen=True)
class BinarySolution:
    x: tuple[int, ...]
    value: float
    nodes: int = field(default=0, compare=False)


def export_edge_formulation(g: Graph, min_size: int | None = None) -> BinaryProgram:
    """``max sum w_i x_i`` s.t. ``x_i + x_j <= 1`` for every non-adjacent ``i < j``,
    plus ``sum x_i >= min_size`` when given."""
    n = g.n
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            if not g.has_edge(i, j):
                coefs = [0.0] * n
                coefs[i] = coefs[j] = 1.0
                rows.append(Constraint(tuple(coefs), "<=", 1.0, f"ne_{i + 1}_{j + 1}"))
    if min_size is not None:
        rows.append(Constraint((1.0,) * n, ">=", float(min_size), "size"))
    return BinaryProgram(tuple(g.weights), tuple(rows))


def bnb_solve_binary(p: BinaryProgram) -> BinarySolution:
    """Depth-first binary branch-and-bound.

    Variables are branched in order of decreasing ``|c_i|`` (lowest index on
    ties), 1-branch first. A node's upper bound is its fixed objective value
    plus every positive coefficient still free; the node is discarded when
    that bound is below the incumbent, or as soon as some constraint cannot
    be met by any completion (interval check on the constraint's lhs).
    """
    n = p.num_vars
    c = np.asarray(p.objective, dtype=np.float64)
    order = sorted(range(n), key=lambda i: (-abs(c[i]), i))
    pos_suffix = np.zeros(n + 1)
    for depth in range(n - 1, -1, -1):
        pos_suffix[depth] = pos_suffix[depth + 1] + max(c[order[depth]], 0.0)

    m = len(p.constraints)
    a = np.array([con.coefs for con in p.constraints], dtype=np.float64).reshape(m, n)
    rhs = np.array([con.rhs for con in p.constraints], dtype=np.float64)
    is_le = np.array([con.relation in ("<=", "=") for con in p.constraints], dtype=bool)
    is_ge = np.array([con.relation in (">=", "=") for con in p.constraints], dtype=bool)
    lo0 = np.minimum(a, 0.0).sum(axis=1)
    hi0 = np.maximum(a, 0.0).sum(axis=1)
    # moving x_i from "free" to fixed value v shifts [lo, hi] by these deltas
    d_lo = [(-np.minimum(a[:, i], 0.0), a[:, i] - np.minimum(a[:, i], 0.0)) for i in range(n)]
    d_hi = [(-np.maximum(a[:, i], 0.0), a[:, i] - np.maximum(a[:, i], 0.0)) for i in range(n)]

    def viable(lo: np.ndarray, hi: np.ndarray) -> bool:
        if np.any(is_le & (lo > rhs + _FEAS_TOL)):
            return False
        return not np.any(is_ge & (hi < rhs - _FEAS_TOL))

    best_val = -math.inf
    best_x: list[int] | None = None
    x = [0] * n
    nodes = 0

    def branch(depth: int, val: float, lo: np.ndarray, hi: np.ndarray) -> None:
        nonlocal best_val, best_x, nodes
        nodes += 1
        if best_x is not None and val + pos_suffix[depth] < best_val:
            return
        if not viable(lo, hi):
            return
        if depth == n:
            if best_x is None or val > best_val:
                best_val, best_x = val, list(x)
            return
        i = order[depth]
        for v in (1, 0):
            x[i] = v
            branch(depth + 1, val + v * c[i], lo + d_lo[i][v], hi + d_hi[i][v])
        x[i] = 0

    branch(0, 0.0, lo0, hi0)
    if best_x is None:
        raise Infeasible("no 0-1 assignment satisfies the constraints")
    return BinarySolution(tuple(best_x), p.value(best_x), nodes)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def _linear_expr(coefs) -> str:
    terms = []
    for i, a in enumerate(coefs):
        if a == 0:
            continue
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        body = f"x{i + 1}" if mag == 1 else f"{_fmt(mag)} x{i + 1}"
        terms.append((sign, body))
    if not terms:
        return "0 x1" if coefs else "0"
    first_sign, first = terms[0]
    out = ("- " if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def emit_lp_text(p: BinaryProgram) -> str:
    """CPLEX LP file text with Maximize / Subject To / Binary / End sections."""
    lines = ["\\ clique edge formulation", "Maximize", f" obj: {_linear_expr(p.objective)}", "Subject To"]
    for k, con in enumerate(p.constraints):
        name = con.name or f"c{k + 1}"
        lines.append(f" {name}: {_linear_expr(con.coefs)} {con.relation} {_fmt(con.rhs)}")
    lines.append("Binary")
    if p.num_vars:
        lines.append(" " + " ".join(f"x{i + 1}" for i in range(p.num_vars)))
    lines.append("End")
    return "\n".join(lines) + "\n"


_TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*x(\d+)")


def _parse_expr(expr: str, n: int) -> list[float]:
    coefs = [0.0] * n
    expr = expr.strip()
    if expr == "0":
        return coefs
    pos = 0
    for m in _TERM.finditer(expr):
        if expr[pos:m.start()].strip():
            raise ValueError(f"cannot parse LP expression near {expr[pos:m.start()]!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        mag = float(m.group(2)) if m.group(2) else 1.0
        coefs[int(m.group(3)) - 1] += sign * mag
        pos = m.end()
    if expr[pos:].strip():
        raise ValueError(f"trailing LP text {expr[pos:]!r}")
    return coefs


def parse_lp_text(text: str) -> BinaryProgram:
    """Read back LP text in the dialect written by :func:`emit_lp_text`."""
    section = None
    obj_line = ""
    con_lines: list[str] = []
    binaries: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in ("maximize", "subject to", "binary", "end"):
            section = low
            continue
        if section == "maximize":
            obj_line += " " + line
        elif section == "subject to":
            con_lines.append(line)
        elif section == "binary":
            binaries.extend(line.split())
        else:
            raise ValueError(f"unexpected LP line {line!r}")
    n = len(binaries)
    if [f"x{i + 1}" for i in range(n)] != binaries:
        raise ValueError("binary section must list x1..xn in order")
    obj_line = obj_line.split(":", 1)[-1]
    constraints = []
    for line in con_lines:
        name, body = line.split(":", 1)
        m = re.match(r"(.*?)\s*(<=|>=|=)\s*(\S+)$", body.strip())
        if not m:
            raise ValueError(f"malformed constraint {line!r}")
        constraints.append(Constraint(tuple(_parse_expr(m.group(1), n)), m.group(2), float(m.group(3)), name.strip()))
    return BinaryProgram(tuple(_parse_expr(obj_line, n)), tuple(constraints))
