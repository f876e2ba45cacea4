"""Binary particle swarm optimisation for maximum weight clique."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .solvers import SolveResult, greedy_max_weight_clique, modified_weights


@dataclass(frozen=True)
class BpsoParams:
    particles: int = 20
    iterations: int = 100
    inertia: float = 0.7
    cognitive: float = 1.4
    social: float = 1.4
    v_max: float = 4.0
    seed: int = 0
    greedy_init: bool = True

    def __post_init__(self):
        if self.particles < 1 or self.iterations < 1:
            raise ValueError("particles and iterations must be >= 1")
        if not self.v_max > 0:
            raise ValueError("v_max must be positive")


class _Repair:
    """Map an arbitrary 0/1 vector to a maximal clique.

    Selected vertices are scanned by decreasing neighbour-weight score and
    kept when adjacent to everything kept so far; the clique is then grown
    with unselected vertices in the same order until maximal.
    """

    def __init__(self, g: Graph):
        self.g = g
        score = modified_weights(g) if g.n else np.zeros(0)
        self.order = sorted(range(g.n), key=lambda v: (-score[v], v))
        self.rank = np.empty(g.n, dtype=np.intp)
        self.rank[self.order] = np.arange(g.n)

    def __call__(self, x: np.ndarray) -> list[int]:
        adj = self.g.adj
        common = self.g.all_mask
        kept: list[int] = []
        selected = np.flatnonzero(x)
        for v in selected[np.argsort(self.rank[selected], kind="stable")]:
            v = int(v)
            if common >> v & 1:
                kept.append(v)
                common &= adj[v]
        if common:
            for v in self.order:
                if common >> v & 1:
                    kept.append(v)
                    common &= adj[v]
                    if not common:
                        break
        return kept


def bpso_max_weight_clique(g: Graph, params: BpsoParams = BpsoParams()) -> SolveResult:
    """Run ``params.particles`` particles for ``params.iterations`` iterations.

    Velocities follow the inertia/cognitive/social update with clamping to
    ``[-v_max, v_max]``; positions are resampled bitwise with probability
    ``sigmoid(velocity)``. Every position is repaired into a maximal clique
    (and overwritten with it) before evaluation. Particle 0 starts from the
    greedy clique when ``greedy_init`` is set. Returns the all-best position.
    """
    start = time.perf_counter()
    n, L = g.n, params.particles
    if n == 0:
        return SolveResult((), 0.0, "bpso", iterations=params.iterations)
    rng = np.random.Generator(np.random.PCG64(params.seed))
    w = np.asarray(g.weights)
    repair = _Repair(g)

    pos = rng.random((L, n)) < 0.5
    if params.greedy_init:
        pos[0] = False
        pos[0, list(greedy_max_weight_clique(g).vertices)] = True
    vel = rng.uniform(-params.v_max, params.v_max, size=(L, n))

    def evaluate(pos: np.ndarray) -> np.ndarray:
        fit = np.empty(L)
        for p in range(L):
            kept = repair(pos[p])
            pos[p] = False
            pos[p, kept] = True
            fit[p] = w[kept].sum()
        return fit

    fit = evaluate(pos)
    pbest, pbest_fit = pos.copy(), fit.copy()
    g_idx = int(np.argmax(pbest_fit))
    gbest, gbest_fit = pbest[g_idx].copy(), pbest_fit[g_idx]

    for _ in range(params.iterations):
        r1 = rng.random((L, n))
        r2 = rng.random((L, n))
        xf = pos.astype(np.float64)
        vel = (
            params.inertia * vel
            + params.cognitive * r1 * (pbest - xf)
            + params.social * r2 * (gbest - xf)
        )
        np.clip(vel, -params.v_max, params.v_max, out=vel)
        pos = rng.random((L, n)) < 1.0 / (1.0 + np.exp(-vel))
        fit = evaluate(pos)
        better = fit > pbest_fit
        pbest[better] = pos[better]
        pbest_fit[better] = fit[better]
        g_idx = int(np.argmax(pbest_fit))
        if pbest_fit[g_idx] > gbest_fit:
            gbest, gbest_fit = pbest[g_idx].copy(), pbest_fit[g_idx]

    vertices = tuple(int(v) for v in np.flatnonzero(gbest))
    return SolveResult(
        vertices,
        g.weight_of(vertices),
        "bpso",
        iterations=params.iterations,
        elapsed=time.perf_counter() - start,
    )
