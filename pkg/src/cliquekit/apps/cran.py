"""Coordinated scheduling in cloud radio access networks.

Fixed-power scheduling is a maximum weight clique of size ``R * B`` in the
scheduling graph over (user, RRH, RRB) associations. Joint scheduling and
power control unions one local power-control graph per RRB index and looks
for a maximum weight ``R``-clique.

Index order everywhere: gains ``h[b, r, u]``, powers ``P[b, r]``, rate
weights ``pi[u, b, r]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConstraintViolation, Infeasible
from ..graph import Graph, build_graph
from ..mapping import ScenarioMapping
from ..solvers import SolveResult, solve_clique


@dataclass(frozen=True, eq=False)
class CranScenario:
    gains: np.ndarray  # complex (B, R, U)
    powers: np.ndarray  # (B, R) watts
    power_caps: np.ndarray  # (B, R) watts
    noise: float
    gap: float = 1.0
    weights: np.ndarray | None = None  # (U, B, R), default all ones

    def __post_init__(self):
        h = np.asarray(self.gains, dtype=np.complex128)
        if h.ndim != 3 or min(h.shape) < 1:
            raise ValueError("gains must be a B x R x U array with B, R, U >= 1")
        B, R, U = h.shape
        p = np.broadcast_to(np.asarray(self.powers, dtype=np.float64), (B, R)).copy()
        cap = np.broadcast_to(np.asarray(self.power_caps, dtype=np.float64), (B, R)).copy()
        pi = np.ones((U, B, R)) if self.weights is None else np.asarray(self.weights, dtype=np.float64)
        pi = np.broadcast_to(pi, (U, B, R)).copy()
        for name, val in (("gains", h), ("powers", p), ("power_caps", cap), ("weights", pi)):
            object.__setattr__(self, name, val)
        if not self.noise > 0:
            raise ValueError("noise variance must be positive")
        if not self.gap >= 1:
            raise ValueError("SINR gap must be >= 1")
        if np.any(p < 0) or np.any(p > cap * (1 + 1e-12)):
            raise ValueError("powers must lie in [0, power_caps]")
        if not np.all(np.isfinite(cap)):
            raise ValueError("power caps must be finite")
        if np.any(pi < 0):
            raise ValueError("rate weights must be non-negative")

    @property
    def n_rrhs(self) -> int:
        return self.gains.shape[0]

    @property
    def n_rrbs(self) -> int:
        return self.gains.shape[1]

    @property
    def n_users(self) -> int:
        return self.gains.shape[2]

    @property
    def cpg(self) -> np.ndarray:
        return np.abs(self.gains) ** 2


Association = tuple[int, int, int]  # (u, b, r)


@dataclass(frozen=True)
class Schedule:
    assign: tuple[tuple[int, ...], ...]  # assign[b][r] = user
    powers: tuple[tuple[float, ...], ...]  # powers[b][r]
    objective: float
    raw: SolveResult | None = field(default=None, compare=False)

    def rows(self, s: CranScenario) -> list[tuple[int, int, int, float, float]]:
        """``(b, r, user, power, rate)`` per resource block."""
        p = np.asarray(self.powers)
        out = []
        for b, row in enumerate(self.assign):
            for r, u in enumerate(row):
                out.append((b, r, u, float(p[b, r]), cran_rate(s, u, b, r, p)))
        return out


def cran_sinr(s: CranScenario, u: int, b: int, r: int, powers: np.ndarray | None = None) -> float:
    """SINR of user u on RRB r of RRH b; interference only from RRB r at other RRHs."""
    p = s.powers if powers is None else np.asarray(powers, dtype=np.float64)
    cpg = s.cpg
    interference = math.fsum(p[o, r] * cpg[o, r, u] for o in range(s.n_rrhs) if o != b)
    return float(p[b, r] * cpg[b, r, u] / (s.gap * (s.noise + interference)))


def cran_rate(s: CranScenario, u: int, b: int, r: int, powers: np.ndarray | None = None) -> float:
    """Spectral efficiency ``log2(1 + SINR)`` in bits/s/Hz."""
    return math.log2(1.0 + cran_sinr(s, u, b, r, powers))


def schedule_objective(s: CranScenario, assign, powers=None) -> float:
    return math.fsum(
        s.weights[u, b, r] * cran_rate(s, u, b, r, powers)
        for b, row in enumerate(assign)
        for r, u in enumerate(row)
    )


def check_schedule(s: CranScenario, sched: Schedule) -> None:
    """Each RRB serves exactly one user, each user uses one RRH, powers within caps."""
    B, R, U = s.n_rrhs, s.n_rrbs, s.n_users
    if len(sched.assign) != B or any(len(row) != R for row in sched.assign):
        raise ConstraintViolation("schedule does not cover every (RRH, RRB) exactly once")
    rrh_of: dict[int, int] = {}
    for b, row in enumerate(sched.assign):
        for u in row:
            if not 0 <= u < U:
                raise ConstraintViolation(f"user {u} out of range")
            if rrh_of.setdefault(u, b) != b:
                raise ConstraintViolation(f"user {u} served by RRHs {rrh_of[u]} and {b}")
    p = np.asarray(sched.powers)
    if np.any(p < 0) or np.any(p > s.power_caps * (1 + 1e-12)):
        raise ConstraintViolation("power outside [0, cap]")
    obj = schedule_objective(s, sched.assign, p)
    if not math.isclose(obj, sched.objective, rel_tol=1e-9, abs_tol=1e-12):
        raise ConstraintViolation(f"objective {sched.objective} differs from recomputed {obj}")


# --- fixed-power scheduling -----------------------------------------------


def build_scheduling_graph(s: CranScenario) -> tuple[Graph, ScenarioMapping]:
    """Vertex per (u, b, r); adjacent iff a shared user stays on one RRH and
    the two associations use different (RRH, RRB) slots."""
    labels: list[Association] = [
        (u, b, r) for u in range(s.n_users) for b in range(s.n_rrhs) for r in range(s.n_rrbs)
    ]
    edges = []
    for i, (u, b, r) in enumerate(labels):
        for j in range(i + 1, len(labels)):
            u2, b2, r2 = labels[j]
            if (u != u2 or b == b2) and (b, r) != (b2, r2):
                edges.append((i, j))
    weights = [s.weights[u, b, r] * cran_rate(s, u, b, r) for u, b, r in labels]
    return build_graph(len(labels), edges, weights, allow_zero=True), ScenarioMapping(labels)


def solve_schedule(s: CranScenario, algo: str = "exact", **solver_kw) -> Schedule:
    """Maximum weight ``R*B``-clique of the scheduling graph, decoded."""
    g, mapping = build_scheduling_graph(s)
    res = solve_clique(g, algo, min_size=s.n_rrhs * s.n_rrbs, **solver_kw)
    assign = [[-1] * s.n_rrbs for _ in range(s.n_rrhs)]
    for u, b, r in mapping.decode(res.vertices):
        assign[b][r] = u
    assign_t = tuple(tuple(row) for row in assign)
    powers = tuple(tuple(float(x) for x in row) for row in s.powers)
    sched = Schedule(assign_t, powers, schedule_objective(s, assign_t), raw=res)
    check_schedule(s, sched)
    if not math.isclose(sched.objective, res.weight, rel_tol=1e-9, abs_tol=1e-12):
        raise ConstraintViolation("schedule objective differs from clique weight")
    return sched


def _c1_ok(assign) -> bool:
    rrh_of: dict[int, int] = {}
    for b, row in enumerate(assign):
        for u in row:
            if rrh_of.setdefault(u, b) != b:
                return False
    return True


def _all_assignments(s: CranScenario):
    B, R, U = s.n_rrhs, s.n_rrbs, s.n_users
    for flat in itertools.product(range(U), repeat=B * R):
        assign = tuple(tuple(flat[b * R:(b + 1) * R]) for b in range(B))
        if _c1_ok(assign):
            yield assign


def brute_force_schedule(s: CranScenario) -> float:
    """Best objective over all ``U ** (B*R)`` assignments that keep each user on one RRH."""
    best = None
    for assign in _all_assignments(s):
        val = schedule_objective(s, assign)
        if best is None or val > best:
            best = val
    if best is None:
        raise Infeasible("no assignment satisfies the one-RRH-per-user constraint")
    return best


def feasible_schedules(s: CranScenario) -> set[tuple[tuple[int, ...], ...]]:
    return set(_all_assignments(s))


# --- joint scheduling and power control -----------------------------------


def power_grid(cap: float, levels: int) -> list[float]:
    return [cap * i / levels for i in range(1, levels + 1)]


JointLabel = tuple[int, tuple[int, ...], tuple[float, ...]]  # (r, users per RRH, powers per RRH)


def _rrb_weight(s: CranScenario, r: int, users: tuple[int, ...], p_col: np.ndarray) -> float:
    p = s.powers.copy()
    p[:, r] = p_col
    return math.fsum(s.weights[u, b, r] * cran_rate(s, u, b, r, p) for b, u in enumerate(users))


def best_rrb_powers(s: CranScenario, r: int, users: tuple[int, ...], levels: int) -> tuple[tuple[float, ...], float]:
    """Exhaustive grid search of RRB r's powers for the user tuple ``users``.

    Grid per RRH: ``cap * i / levels`` for ``i = 1..levels``. First maximiser
    in lexicographic grid order wins.
    """
    grids = [power_grid(float(s.power_caps[b, r]), levels) for b in range(s.n_rrhs)]
    best_p, best_w = None, -math.inf
    for combo in itertools.product(*grids):
        w = _rrb_weight(s, r, users, np.asarray(combo))
        if w > best_w:
            best_p, best_w = combo, w
    return tuple(best_p), best_w


def build_joint_graph(s: CranScenario, levels: int = 1) -> tuple[Graph, ScenarioMapping]:
    """Union of local power-control graphs, one per RRB index.

    A vertex of local graph r is a tuple ``(u_1..u_B)`` of distinct users
    (user ``u_b`` on RRH b at RRB r) with grid-optimised powers. Only
    vertices of different RRB indices can be adjacent: they are when no
    user appears under two different RRHs across the pair.
    """
    if levels < 1:
        raise ValueError("power grid needs at least one level")
    B, R, U = s.n_rrhs, s.n_rrbs, s.n_users
    labels: list[JointLabel] = []
    weights: list[float] = []
    for r in range(R):
        for users in itertools.permutations(range(U), B):
            p, w = best_rrb_powers(s, r, users, levels)
            labels.append((r, users, p))
            weights.append(w)
    edges = []
    for i, (r1, us1, _) in enumerate(labels):
        rrh1 = {u: b for b, u in enumerate(us1)}
        for j in range(i + 1, len(labels)):
            r2, us2, _ = labels[j]
            if r1 == r2:
                continue
            if all(rrh1.get(u, b) == b for b, u in enumerate(us2)):
                edges.append((i, j))
    return build_graph(len(labels), edges, weights, allow_zero=True), ScenarioMapping(labels)


def solve_joint(s: CranScenario, algo: str = "exact", levels: int = 1, **solver_kw) -> Schedule:
    """Maximum weight ``R``-clique of the joint graph, decoded with its powers."""
    g, mapping = build_joint_graph(s, levels)
    res = solve_clique(g, algo, min_size=s.n_rrbs, **solver_kw)
    assign = [[-1] * s.n_rrbs for _ in range(s.n_rrhs)]
    powers = s.powers.copy()
    for r, users, p in mapping.decode(res.vertices):
        for b, u in enumerate(users):
            assign[b][r] = u
            powers[b, r] = p[b]
    assign_t = tuple(tuple(row) for row in assign)
    p_t = tuple(tuple(float(x) for x in row) for row in powers)
    sched = Schedule(assign_t, p_t, schedule_objective(s, assign_t, powers), raw=res)
    check_schedule(s, sched)
    if not math.isclose(sched.objective, res.weight, rel_tol=1e-9, abs_tol=1e-12):
        raise ConstraintViolation("joint schedule objective differs from clique weight")
    return sched


def brute_force_joint(s: CranScenario, levels: int) -> float:
    """Best objective over all C1-feasible assignments and every joint grid power matrix."""
    B, R = s.n_rrhs, s.n_rrbs
    cells = [(b, r) for b in range(B) for r in range(R)]
    grids = [power_grid(float(s.power_caps[b, r]), levels) for b, r in cells]
    best = None
    power_mats = []
    for combo in itertools.product(*grids):
        p = np.empty((B, R))
        for (b, r), x in zip(cells, combo):
            p[b, r] = x
        power_mats.append(p)
    for assign in _all_assignments(s):
        for p in power_mats:
            val = schedule_objective(s, assign, p)
            if best is None or val > best:
                best = val
    if best is None:
        raise Infeasible("no assignment satisfies the one-RRH-per-user constraint")
    return best


def random_cran_scenario(
    rng: np.random.Generator,
    n_users: int,
    n_rrhs: int,
    n_rrbs: int,
    *,
    path_loss: float = 1.0,
    power: float = 1.0,
    noise: float = 0.1,
    gap: float = 1.0,
) -> CranScenario:
    """Rayleigh gains with ``E|h|^2 = path_loss``, equal powers at the cap."""
    shape = (n_rrhs, n_rrbs, n_users)
    h = np.sqrt(path_loss / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    p = np.full((n_rrhs, n_rrbs), power)
    return CranScenario(h, p, p.copy(), noise, gap)
