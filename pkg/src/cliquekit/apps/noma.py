"""Uplink NOMA maximum access: admission control, pairing and channel assignment.

Candidate (cluster, channel) pairs that meet every member's rate floor become
vertices of a conflict graph; a maximum weight independent set (weights =
cluster sizes) is a maximum admission.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConstraintViolation
from ..graph import Graph, build_graph
from ..mapping import ScenarioMapping
from ..solvers import SolveResult, max_weight_independent_set

Cluster = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class NomaScenario:
    gains: np.ndarray  # complex, (U, K)
    powers: np.ndarray  # (U,) watts
    noise: float
    gap: float
    bandwidth: np.ndarray  # (U, K) hertz
    rate_min: np.ndarray  # (U,) bits/s

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=np.complex128)
        if gains.ndim != 2 or min(gains.shape) < 1:
            raise ValueError("gains must be a U x K array with U, K >= 1")
        u, k = gains.shape
        bw = np.broadcast_to(np.asarray(self.bandwidth, dtype=np.float64), (u, k)).copy()
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "powers", np.asarray(self.powers, dtype=np.float64).reshape(u))
        object.__setattr__(self, "bandwidth", bw)
        object.__setattr__(self, "rate_min", np.asarray(self.rate_min, dtype=np.float64).reshape(u))
        if not self.noise > 0:
            raise ValueError("noise variance must be positive")
        if not self.gap >= 1:
            raise ValueError("SINR gap must be >= 1")
        if np.any(bw <= 0):
            raise ValueError("bandwidths must be positive")
        if np.any(self.rate_min < 0):
            raise ValueError("rate floors must be non-negative")
        if np.any(self.powers < 0):
            raise ValueError("powers must be non-negative")

    @property
    def n_users(self) -> int:
        return self.gains.shape[0]

    @property
    def n_channels(self) -> int:
        return self.gains.shape[1]

    @property
    def cpg(self) -> np.ndarray:
        return np.abs(self.gains) ** 2

    def without_channel(self, k: int) -> NomaScenario:
        keep = [j for j in range(self.n_channels) if j != k]
        return NomaScenario(
            self.gains[:, keep], self.powers, self.noise, self.gap, self.bandwidth[:, keep], self.rate_min
        )


@dataclass(frozen=True)
class NomaAssignment:
    clusters: tuple[tuple[Cluster, int], ...]  # ((users...), channel), sorted by channel
    raw: SolveResult | None = field(default=None, compare=False)

    @property
    def admitted(self) -> frozenset[int]:
        return frozenset(u for q, _ in self.clusters for u in q)

    @property
    def count(self) -> int:
        return len(self.admitted)


def _weaker(s: NomaScenario, other: int, u: int, k: int) -> bool:
    """True when ``other`` is decoded after ``u`` on channel k (interferes with u).

    Equal channel power gains are ordered by index: the lower index counts
    as stronger.
    """
    g_o, g_u = s.cpg[other, k], s.cpg[u, k]
    return g_o < g_u or (g_o == g_u and other > u)


def noma_sinr(s: NomaScenario, cluster: Cluster, k: int, u: int) -> float:
    """Linear SINR of user ``u`` in ``cluster`` on channel ``k`` under SIC."""
    if len(cluster) > 2:
        raise ValueError("a channel accommodates at most two users")
    if u not in cluster:
        raise ValueError(f"user {u} not in cluster {cluster}")
    cpg = s.cpg
    interference = math.fsum(
        s.powers[o] * cpg[o, k] for o in cluster if o != u and _weaker(s, o, u, k)
    )
    return float(s.powers[u] * cpg[u, k] / (s.gap * (s.noise + interference)))


def noma_rate(s: NomaScenario, cluster: Cluster, k: int, u: int) -> float:
    return float(s.bandwidth[u, k] * math.log2(1.0 + noma_sinr(s, cluster, k, u)))


def candidate_clusters(n_users: int) -> list[Cluster]:
    singles = [(u,) for u in range(n_users)]
    pairs = list(itertools.combinations(range(n_users), 2))
    return singles + pairs


def feasible_assignments(s: NomaScenario) -> list[tuple[Cluster, int]]:
    """Every (cluster, channel) whose members all meet their rate floors."""
    out = []
    for k in range(s.n_channels):
        for q in candidate_clusters(s.n_users):
            if all(noma_rate(s, q, k, u) >= s.rate_min[u] for u in q):
                out.append((q, k))
    return out


def build_noma_graph(s: NomaScenario) -> tuple[Graph, ScenarioMapping]:
    """Conflict graph: edge when two candidates share a user or a channel."""
    labels = feasible_assignments(s)
    edges = []
    for i, (q1, k1) in enumerate(labels):
        for j in range(i + 1, len(labels)):
            q2, k2 = labels[j]
            if k1 == k2 or set(q1) & set(q2):
                edges.append((i, j))
    g = build_graph(len(labels), edges, [float(len(q)) for q, _ in labels])
    return g, ScenarioMapping(labels)


def check_noma_assignment(s: NomaScenario, a: NomaAssignment) -> None:
    """Independent check of the admission constraints; raises on violation.

    Rate floor for every admitted user (interference from co-channel admitted
    users only), each admitted user on exactly one channel, at most two users
    per channel.
    """
    channel_of: dict[int, int] = {}
    load: dict[int, list[int]] = {}
    for q, k in a.clusters:
        if not 0 <= k < s.n_channels:
            raise ConstraintViolation(f"channel {k} out of range")
        for u in q:
            if u in channel_of:
                raise ConstraintViolation(f"user {u} scheduled on more than one channel")
            channel_of[u] = k
            load.setdefault(k, []).append(u)
    for k, users in load.items():
        if len(users) > 2:
            raise ConstraintViolation(f"channel {k} serves {len(users)} users")
    for u, k in channel_of.items():
        rate = noma_rate(s, tuple(sorted(load[k])), k, u)
        if rate < s.rate_min[u]:
            raise ConstraintViolation(f"user {u} rate {rate} below floor {s.rate_min[u]}")


def solve_max_access(s: NomaScenario, algo: str = "exact", **solver_kw) -> NomaAssignment:
    g, mapping = build_noma_graph(s)
    res = max_weight_independent_set(g, algo=algo, **solver_kw)
    clusters = tuple(sorted(mapping.decode(res.vertices), key=lambda qk: qk[1]))
    out = NomaAssignment(clusters, raw=res)
    check_noma_assignment(s, out)
    if out.count != round(res.weight):
        raise ConstraintViolation("admitted count differs from independent-set weight")
    return out


def brute_force_max_access(s: NomaScenario) -> int:
    """Exhaustive search over every user -> (off | channel) map; returns the best count."""
    best = 0
    U, K = s.n_users, s.n_channels
    for choice in itertools.product(range(-1, K), repeat=U):
        admitted = [u for u in range(U) if choice[u] >= 0]
        if len(admitted) <= best:
            continue
        clusters = {}
        for u in admitted:
            clusters.setdefault(choice[u], []).append(u)
        if any(len(q) > 2 for q in clusters.values()):
            continue
        a = NomaAssignment(tuple((tuple(q), k) for k, q in sorted(clusters.items())))
        try:
            check_noma_assignment(s, a)
        except ConstraintViolation:
            continue
        best = len(admitted)
    return best


def random_noma_scenario(
    rng: np.random.Generator,
    n_users: int,
    n_channels: int,
    *,
    path_loss: float = 1.0,
    power: float = 1.0,
    noise: float = 0.1,
    gap: float = 1.0,
    bandwidth: float = 1.0,
    rate_min: float | tuple[float, float] = (0.5, 2.0),
) -> NomaScenario:
    """Rayleigh gains with ``E|h|^2 = path_loss``; floors uniform in a range."""
    shape = (n_users, n_channels)
    h = np.sqrt(path_loss / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    if isinstance(rate_min, tuple):
        rmin = rng.uniform(*rate_min, size=n_users)
    else:
        rmin = np.full(n_users, float(rate_min))
    return NomaScenario(h, np.full(n_users, power), noise, gap, np.full(shape, bandwidth), rmin)
