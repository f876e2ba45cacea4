"""RFID reader-coverage collision avoidance (RCCAA).

Each reader picks one of a few nested interrogation radii or stays off.
Reader/radius pairs are vertices of a conflict graph; a maximum weight
independent set with weight ``|coverage|`` covers the most tags without
reader-to-tag (and, given positions, reader-to-reader) collisions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConstraintViolation
from ..graph import Graph, build_graph
from ..mapping import ScenarioMapping
from ..solvers import SolveResult, max_weight_independent_set


@dataclass(frozen=True, eq=False)
class RfidScenario:
    """``coverage[r][d]`` is the tag set reader r reads at radius level d.

    ``reader_positions`` (m x 2) and ``radii`` (one length per level) are
    optional; when both are given, an active reader may not sit inside
    another active reader's range.
    """

    n_tags: int
    coverage: tuple[tuple[frozenset[int], ...], ...]
    alpha: int
    reader_positions: np.ndarray | None = None
    radii: tuple[float, ...] | None = None

    def __post_init__(self):
        cov = tuple(tuple(frozenset(t) for t in levels) for levels in self.coverage)
        object.__setattr__(self, "coverage", cov)
        if self.alpha < 1:
            raise ValueError("tag capacity alpha must be >= 1")
        n_levels = {len(levels) for levels in cov}
        if len(n_levels) > 1:
            raise ValueError("every reader needs the same number of radius levels")
        for r, levels in enumerate(cov):
            for d in range(1, len(levels)):
                if not levels[d - 1] <= levels[d]:
                    raise ValueError(f"reader {r}: coverage is not nested at level {d}")
            for tags in levels:
                if any(not 0 <= t < self.n_tags for t in tags):
                    raise ValueError(f"reader {r}: tag id out of range")
        if (self.reader_positions is None) != (self.radii is None):
            raise ValueError("reader_positions and radii must be given together")
        if self.reader_positions is not None:
            pos = np.asarray(self.reader_positions, dtype=np.float64).reshape(len(cov), 2)
            object.__setattr__(self, "reader_positions", pos)
            object.__setattr__(self, "radii", tuple(float(x) for x in self.radii))
            if len(self.radii) != self.n_levels:
                raise ValueError("need one radius length per level")

    @property
    def n_readers(self) -> int:
        return len(self.coverage)

    @property
    def n_levels(self) -> int:
        return len(self.coverage[0]) if self.coverage else 0

    @property
    def has_geometry(self) -> bool:
        return self.reader_positions is not None

    def reader_conflict(self, r1: int, d1: int, r2: int, d2: int) -> bool:
        """Reader-to-reader collision: one reader lies within the other's range."""
        if not self.has_geometry or r1 == r2:
            return False
        dist = float(np.hypot(*(self.reader_positions[r1] - self.reader_positions[r2])))
        return dist <= self.radii[d1] or dist <= self.radii[d2]


@dataclass(frozen=True)
class RfidPlan:
    activation: tuple[tuple[int, int], ...]  # sorted (reader, level)
    raw: SolveResult | None = field(default=None, compare=False)

    def covered(self, s: RfidScenario) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for r, d in self.activation:
            out |= s.coverage[r][d]
        return out


def build_rfid_conflict_graph(s: RfidScenario) -> tuple[Graph, ScenarioMapping]:
    """Vertices: (reader, level) with ``0 < |coverage| <= alpha``.

    Edges join incompatible pairs: same reader, overlapping coverage, or
    reader-to-reader collision. Pairs with empty coverage add no tags and
    are left out.
    """
    labels = [
        (r, d)
        for r in range(s.n_readers)
        for d in range(s.n_levels)
        if 0 < len(s.coverage[r][d]) <= s.alpha
    ]
    edges = []
    for i, (r1, d1) in enumerate(labels):
        for j in range(i + 1, len(labels)):
            r2, d2 = labels[j]
            if (
                r1 == r2
                or s.coverage[r1][d1] & s.coverage[r2][d2]
                or s.reader_conflict(r1, d1, r2, d2)
            ):
                edges.append((i, j))
    weights = [float(len(s.coverage[r][d])) for r, d in labels]
    return build_graph(len(labels), edges, weights), ScenarioMapping(labels)


def check_rfid_plan(s: RfidScenario, plan: RfidPlan) -> None:
    readers = [r for r, _ in plan.activation]
    if len(set(readers)) != len(readers):
        raise ConstraintViolation("a reader uses more than one radius")
    for r, d in plan.activation:
        if len(s.coverage[r][d]) > s.alpha:
            raise ConstraintViolation(f"reader {r} exceeds tag capacity at level {d}")
    for (r1, d1), (r2, d2) in itertools.combinations(plan.activation, 2):
        if s.coverage[r1][d1] & s.coverage[r2][d2]:
            raise ConstraintViolation(f"readers {r1} and {r2} both cover a tag")
        if s.reader_conflict(r1, d1, r2, d2):
            raise ConstraintViolation(f"readers {r1} and {r2} collide")


def solve_rccaa(s: RfidScenario, algo: str = "exact", **solver_kw) -> RfidPlan:
    g, mapping = build_rfid_conflict_graph(s)
    res = max_weight_independent_set(g, algo=algo, **solver_kw)
    plan = RfidPlan(tuple(mapping.decode(res.vertices)), raw=res)
    check_rfid_plan(s, plan)
    if len(plan.covered(s)) != round(res.weight):
        raise ConstraintViolation("covered tag count differs from independent-set weight")
    return plan


def brute_force_rccaa(s: RfidScenario) -> int:
    """Best covered-tag count over all ``(levels + 1) ** readers`` activations."""
    best = 0
    for choice in itertools.product(range(-1, s.n_levels), repeat=s.n_readers):
        plan = RfidPlan(tuple((r, d) for r, d in enumerate(choice) if d >= 0))
        try:
            check_rfid_plan(s, plan)
        except ConstraintViolation:
            continue
        best = max(best, len(plan.covered(s)))
    return best


def geometric_scenario(
    reader_positions, tag_positions, radii, alpha: int, *, reader_collisions: bool = True
) -> RfidScenario:
    """Coverage from Euclidean distances: tag t is read at level d when
    ``|reader - tag| <= radii[d]``."""
    readers = np.asarray(reader_positions, dtype=np.float64).reshape(-1, 2)
    tags = np.asarray(tag_positions, dtype=np.float64).reshape(-1, 2)
    radii = sorted(float(x) for x in radii)
    dist = np.hypot(*(readers[:, None, :] - tags[None, :, :]).transpose(2, 0, 1))
    cov = tuple(
        tuple(frozenset(int(t) for t in np.flatnonzero(dist[r] <= rad)) for rad in radii)
        for r in range(len(readers))
    )
    if reader_collisions:
        return RfidScenario(len(tags), cov, alpha, readers, tuple(radii))
    return RfidScenario(len(tags), cov, alpha)


def random_rfid_scenario(
    rng: np.random.Generator,
    n_readers: int,
    n_tags: int,
    n_levels: int,
    *,
    alpha: int = 3,
    side: float = 10.0,
    reader_collisions: bool = False,
) -> RfidScenario:
    readers = rng.uniform(0.0, side, size=(n_readers, 2))
    tags = rng.uniform(0.0, side, size=(n_tags, 2))
    radii = [side * (d + 1) / (2.0 * n_levels + 1) for d in range(n_levels)]
    return geometric_scenario(readers, tags, radii, alpha, reader_collisions=reader_collisions)

