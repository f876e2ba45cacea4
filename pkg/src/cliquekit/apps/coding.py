"""Index coding and instantly decodable network coding (IDNC).

Users and files are 0-based internally. Scenario files and reports use
1-based ids, matching the usual ``v_{uf}`` vertex labels (``13`` = user 1,
file 3).
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ..bpso import BpsoParams
from ..errors import ConstraintViolation, FilesTooMany
from ..graph import Graph, build_graph
from ..mapping import ScenarioMapping
from ..rng import derive_seed, substream
from ..solvers import SolveResult, solve_clique

FILE_GUARD = 20


@dataclass(frozen=True)
class SideInformation:
    n_files: int
    wants: tuple[frozenset[int], ...]
    erasure: tuple[float, ...] = ()

    def __post_init__(self):
        wants = tuple(frozenset(w) for w in self.wants)
        object.__setattr__(self, "wants", wants)
        eps = tuple(float(e) for e in self.erasure) or (0.0,) * len(wants)
        object.__setattr__(self, "erasure", eps)
        if self.n_files < 0:
            raise ValueError("file count must be non-negative")
        if len(eps) != len(wants):
            raise ValueError("need one erasure probability per user")
        for u, w in enumerate(wants):
            if any(not 0 <= f < self.n_files for f in w):
                raise ValueError(f"user {u} wants a file outside 0..{self.n_files - 1}")
        for e in eps:
            if not 0.0 <= e < 1.0:
                raise ValueError(f"erasure probability {e} outside [0, 1)")

    @classmethod
    def from_has(cls, n_files: int, has: Sequence[Sequence[int]], erasure=()) -> SideInformation:
        full = frozenset(range(n_files))
        return cls(n_files, tuple(full - frozenset(h) for h in has), tuple(erasure))

    @property
    def n_users(self) -> int:
        return len(self.wants)

    @property
    def has(self) -> tuple[frozenset[int], ...]:
        full = frozenset(range(self.n_files))
        return tuple(full - w for w in self.wants)

    def interested(self, f: int) -> frozenset[int]:
        return frozenset(u for u, w in enumerate(self.wants) if f in w)

    @property
    def done(self) -> bool:
        return not any(self.wants)

    def targeted(self, files) -> frozenset[int]:
        kappa = frozenset(files)
        return frozenset(u for u, w in enumerate(self.wants) if len(kappa & w) == 1)

    def with_wants(self, wants) -> SideInformation:
        return SideInformation(self.n_files, tuple(wants), self.erasure)


@dataclass(frozen=True)
class Combination:
    files: frozenset[int]
    targeted: frozenset[int]
    objective: float = 0.0
    raw: SolveResult | None = field(default=None, compare=False)

    def label(self) -> str:
        return " ".join(str(f + 1) for f in sorted(self.files))


def idnc_objective(si: SideInformation, files) -> float:
    return math.fsum(1.0 - si.erasure[u] for u in sorted(si.targeted(files)))


# --- index coding ----------------------------------------------------------


def ic_build_graph(si: SideInformation) -> tuple[Graph, ScenarioMapping]:
    """One vertex per file; files f, f' adjacent iff no user wants both."""
    interested = [si.interested(f) for f in range(si.n_files)]
    edges = [
        (f, g)
        for f in range(si.n_files)
        for g in range(f + 1, si.n_files)
        if not interested[f] & interested[g]
    ]
    return build_graph(si.n_files, edges), ScenarioMapping(list(range(si.n_files)))


def check_ic_combination(si: SideInformation, files) -> None:
    kappa = frozenset(files)
    for u, w in enumerate(si.wants):
        if len(kappa & w) > 1:
            raise ConstraintViolation(f"user {u} cannot decode: misses {sorted(kappa & w)}")


def ic_solve(si: SideInformation, algo: str = "exact", **solver_kw) -> Combination:
    """Largest combination that every user can decode."""
    g, mapping = ic_build_graph(si)
    res = solve_clique(g, algo, **solver_kw)
    files = frozenset(mapping.decode(res.vertices))
    check_ic_combination(si, files)
    return Combination(files, si.targeted(files), float(len(files)), raw=res)


def ic_brute_force(si: SideInformation) -> int:
    """Size of the largest decodable combination by scanning all 2^F subsets."""
    if si.n_files > FILE_GUARD:
        raise FilesTooMany(f"F={si.n_files} exceeds guard {FILE_GUARD}")
    best = 0
    for mask in range(1 << si.n_files):
        size = mask.bit_count()
        if size <= best:
            continue
        kappa = {f for f in range(si.n_files) if mask >> f & 1}
        if all(len(kappa & w) <= 1 for w in si.wants):
            best = size
    return best


# --- IDNC ------------------------------------------------------------------


def idnc_build_graph(si: SideInformation) -> tuple[Graph, ScenarioMapping]:
    """Vertex ``(u, f)`` per missing file, weight ``1 - eps_u``.

    ``(u, f)`` and ``(u', f')`` are adjacent when ``f == f'`` or when each
    user already holds the other's missing file.
    """
    labels = [(u, f) for u in range(si.n_users) for f in sorted(si.wants[u])]
    has = si.has
    edges = []
    for i, (u, f) in enumerate(labels):
        for j in range(i + 1, len(labels)):
            v, h = labels[j]
            if u == v:
                continue
            if f == h or (f in has[v] and h in has[u]):
                edges.append((i, j))
    weights = [1.0 - si.erasure[u] for u, _ in labels]
    return build_graph(len(labels), edges, weights), ScenarioMapping(labels)


def check_idnc_combination(si: SideInformation, c: Combination) -> None:
    """Every targeted user misses exactly one file of the combination and
    the reported objective matches the targeted users."""
    for u in c.targeted:
        if len(c.files & si.wants[u]) != 1:
            raise ConstraintViolation(f"targeted user {u} cannot decode instantly")
    if c.targeted != si.targeted(c.files):
        raise ConstraintViolation("targeted set inconsistent with combination")


def idnc_solve(si: SideInformation, algo: str = "exact", **solver_kw) -> Combination:
    """Combination maximising the summed ``1 - eps_u`` of targeted users."""
    g, mapping = idnc_build_graph(si)
    res = solve_clique(g, algo, **solver_kw)
    pairs = mapping.decode(res.vertices)
    files = frozenset(f for _, f in pairs)
    targeted = si.targeted(files)
    out = Combination(files, targeted, idnc_objective(si, files), raw=res)
    check_idnc_combination(si, out)
    if {u for u, _ in pairs} - targeted:
        raise ConstraintViolation("a clique user is not served by the combination")
    return out


def oracle_best_combination(si: SideInformation, guard: int = FILE_GUARD) -> Combination:
    """Exhaustive scan of all file subsets for the best IDNC objective.

    Subsets are scanned by size then lexicographically; the first maximiser
    is returned.
    """
    if si.n_files > guard:
        raise FilesTooMany(f"F={si.n_files} exceeds guard {guard}")
    best: tuple[int, ...] = ()
    best_val = 0.0
    for size in range(1, si.n_files + 1):
        for combo in itertools.combinations(range(si.n_files), size):
            val = idnc_objective(si, combo)
            if val > best_val * (1 + 1e-12):
                best, best_val = combo, val
    files = frozenset(best)
    return Combination(files, si.targeted(files), best_val)


def uncoded_choice(si: SideInformation) -> Combination:
    """Best single file: the one whose requesters have the largest summed ``1 - eps``."""
    best, best_val = None, -1.0
    for f in range(si.n_files):
        val = idnc_objective(si, (f,))
        if si.interested(f) and val > best_val:
            best, best_val = f, val
    files = frozenset() if best is None else frozenset({best})
    return Combination(files, si.targeted(files), max(best_val, 0.0))


# --- broadcast simulation --------------------------------------------------


@dataclass(frozen=True)
class SlotRecord:
    slot: int
    files: tuple[int, ...]
    targeted: tuple[int, ...]
    received: tuple[bool, ...]
    delays: tuple[int, ...]
    cumulative_delay: int

    @property
    def successes(self) -> int:
        """Targeted users that decoded a new file in this slot."""
        return sum(self.received[u] for u in self.targeted)


@dataclass(frozen=True)
class SimulationRecord:
    initial: SideInformation
    slots: tuple[SlotRecord, ...]

    @property
    def completion_time(self) -> int:
        return len(self.slots)

    @property
    def total_delay(self) -> int:
        return self.slots[-1].cumulative_delay if self.slots else 0

    def user_delays(self) -> tuple[int, ...]:
        totals = [0] * self.initial.n_users
        for s in self.slots:
            for u, d in enumerate(s.delays):
                totals[u] += d
        return tuple(totals)

    def csv_rows(self) -> list[list]:
        return [
            [s.slot, " ".join(str(f + 1) for f in s.files), len(s.targeted), s.successes, s.cumulative_delay]
            for s in self.slots
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["slot", "combination", "targeted", "successes", "cum_delay"])
        w.writerows(self.csv_rows())
        return buf.getvalue()


def initial_broadcast(
    n_users: int, n_files: int, erasure: Sequence[float], seed: int
) -> SideInformation:
    """Side information after sending every file once, uncoded.

    File f reaches user u unless ``substream(seed, "initial", f)``'s u-th
    uniform falls below ``eps_u``.
    """
    eps = np.asarray(erasure, dtype=np.float64)
    wants: list[set[int]] = [set() for _ in range(n_users)]
    for f in range(n_files):
        lost = substream(seed, "initial", f).random(n_users) < eps
        for u in np.flatnonzero(lost):
            wants[int(u)].add(f)
    return SideInformation(n_files, tuple(wants), tuple(eps))


def simulate_broadcast(
    si: SideInformation,
    algo: str = "exact",
    seed: int = 0,
    *,
    coding: bool = True,
    max_slots: int = 100_000,
    **solver_kw,
) -> SimulationRecord:
    """Serve every user's Wants set over erasure channels.

    Each slot picks a combination (``idnc_solve`` with ``algo``, or the best
    single file when ``coding`` is False), draws one erasure per user from
    ``substream(seed, "erasure", slot)``, moves the decoded file of each
    receiving targeted user from Wants to Has, and charges one unit of delay
    to every non-targeted user that received the packet while still missing
    files. Runs until no user misses a file.
    """
    state = si
    eps = np.asarray(si.erasure)
    slots: list[SlotRecord] = []
    cum = 0
    t = 0
    while not state.done:
        t += 1
        if t > max_slots:
            raise RuntimeError("simulation exceeded max_slots")
        if not coding:
            choice = uncoded_choice(state)
        else:
            kw = dict(solver_kw)
            if algo == "bpso":
                base = kw.get("params") or BpsoParams()
                kw["params"] = replace(base, seed=derive_seed(seed, "bpso", t))
            choice = idnc_solve(state, algo, **kw)
        received = substream(seed, "erasure", t).random(state.n_users) >= eps
        wants = [set(w) for w in state.wants]
        delays = [0] * state.n_users
        for u in range(state.n_users):
            if not received[u] or not state.wants[u]:
                continue
            if u in choice.targeted:
                (f,) = choice.files & state.wants[u]
                wants[u].discard(f)
            else:
                delays[u] = 1
        cum += sum(delays)
        slots.append(
            SlotRecord(
                t,
                tuple(sorted(choice.files)),
                tuple(sorted(choice.targeted)),
                tuple(bool(r) for r in received),
                tuple(delays),
                cum,
            )
        )
        state = state.with_wants(wants)
    return SimulationRecord(si, tuple(slots))

