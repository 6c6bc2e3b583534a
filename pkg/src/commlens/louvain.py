"""Two-phase greedy modularity optimization.

Phase one sweeps the nodes in random order, moving each into the
neighboring community with the largest positive modularity gain until a
full sweep makes no move.  Phase two collapses communities into a
weighted meta-graph (intra-community weight becomes self-loops) and the
procedure recurses, terminating at the level whose local phase moves
nothing.

Node order is a fresh permutation per sweep drawn from a PCG64 generator
seeded from (seed, level, sweep), so a run is fully determined by the
graph and one integer seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import Graph, Partition, aggregate
from .modularity import EPS_GAIN, CommunityState, modularity
from .rng import generator

__all__ = ["LouvainResult", "local_move_phase", "louvain", "project_partition"]


@dataclass(frozen=True)
class LouvainResult:
    """Outcome of a full Louvain run.

    ``levels`` holds one canonical partition per completed level (level
    l+1 partitions the communities of level l); ``partition`` is their
    composition on the original nodes.  ``q_trace`` records Q of the
    projected partition after each completed level and is strictly
    increasing.  ``passes`` counts local-move sweeps per attempted level,
    including the final sweep that made no move.
    """

    partition: Partition
    q_trace: tuple[float, ...]
    levels: tuple[Partition, ...]
    seed: int
    passes: tuple[int, ...]

    @property
    def num_communities(self) -> int:
        return self.partition.num_communities


def _sweep(state: CommunityState, order: np.ndarray, first_improvement: bool) -> int:
    """One pass over ``order``; returns the number of moves made."""
    comm = state.comm
    degrees = state.graph.degrees
    sigma_tot = state.sigma_tot
    sigma_in = state.sigma_in
    indptr = state._indptr
    indices = state._indices
    weights = state._weights
    m = state.graph.total_weight
    inv_m = 1.0 / m
    half_inv_m2 = 1.0 / (2.0 * m * m)
    moves = 0

    for i in order:
        start, end = indptr[i], indptr[i + 1]
        if start == end:
            continue
        neighbor_w: dict[int, float] = {}
        self_w = 0.0
        for idx in range(start, end):
            j = indices[idx]
            if j == i:
                self_w = weights[idx]
                continue
            c = comm[j]
            if c in neighbor_w:
                neighbor_w[c] += weights[idx]
            else:
                neighbor_w[c] = weights[idx]
        if not neighbor_w:
            continue

        current = comm[i]
        k_i = degrees[i]
        # gain of membership in c, with i lifted out of its own community
        stay = (neighbor_w.get(current, 0.0) * inv_m
                - (sigma_tot[current] - k_i) * k_i * half_inv_m2)
        best_c = current
        best_gain = stay
        if first_improvement:
            for c, w_ic in neighbor_w.items():
                if c == current:
                    continue
                cand = w_ic * inv_m - sigma_tot[c] * k_i * half_inv_m2
                if cand - stay > EPS_GAIN:
                    best_c, best_gain = c, cand
                    break
        else:
            for c, w_ic in neighbor_w.items():
                if c == current:
                    continue
                cand = w_ic * inv_m - sigma_tot[c] * k_i * half_inv_m2
                if cand > best_gain or (cand == best_gain and c < best_c):
                    best_c, best_gain = c, cand
            if best_gain - stay <= EPS_GAIN:
                best_c = current

        if best_c != current:
            sigma_tot[current] -= k_i
            sigma_in[current] -= 2.0 * neighbor_w.get(current, 0.0) + 2.0 * self_w
            sigma_tot[best_c] += k_i
            sigma_in[best_c] += 2.0 * neighbor_w[best_c] + 2.0 * self_w
            comm[i] = best_c
            moves += 1
    return moves


def _local_move(g: Graph, state: CommunityState, seed: int, level: int,
                first_improvement: bool) -> tuple[bool, int]:
    """Sweep until a full pass makes zero moves; returns (improved, sweeps)."""
    improved = False
    sweep = 0
    while True:
        order = generator(seed, level, sweep).permutation(g.n).tolist()
        moves = _sweep(state, order, first_improvement)
        sweep += 1
        if moves == 0:
            return improved, sweep
        improved = True


def local_move_phase(g: Graph, state: CommunityState, *, seed: int,
                     level: int = 0,
                     first_improvement: bool = False) -> tuple[CommunityState, bool]:
    """Run the local-move phase to a fixed point, mutating ``state``.

    Each sweep visits every node in a fresh random permutation and moves
    it to the neighboring community of maximum positive gain (ties to the
    smallest community id); with ``first_improvement`` the first gain
    above threshold is taken instead.  Returns the state and whether any
    move occurred.
    """
    if state.graph is not g:
        raise ValidationError("state was built for a different graph")
    improved, _ = _local_move(g, state, seed, level, first_improvement)
    return state, improved


def louvain(g: Graph, seed: int = 0, *, first_improvement: bool = False) -> LouvainResult:
    """Full two-phase run on ``g``, deterministic for a fixed seed."""
    levels: list[Partition] = []
    q_trace: list[float] = []
    passes: list[int] = []
    graph = g
    # raw composed assignment: original node -> current level's meta-node id
    projected: np.ndarray | None = None

    for level in range(max(g.n, 1)):
        state = CommunityState.singletons(graph)
        improved, sweeps = _local_move(graph, state, seed, level, first_improvement)
        passes.append(sweeps)
        if not improved:
            break
        part = state.to_partition()
        levels.append(part)
        projected = part.assignment if projected is None else part.assignment[projected]
        q_trace.append(modularity(g, Partition(projected)))
        graph = aggregate(graph, part).graph

    partition = (Partition(projected) if projected is not None
                 else Partition.singletons(g.n))
    return LouvainResult(partition=partition, q_trace=tuple(q_trace),
                         levels=tuple(levels), seed=seed, passes=tuple(passes))


def project_partition(levels: list[Partition]) -> Partition:
    """Compose a meta-hierarchy onto the original nodes.

    ``levels[l+1]`` must partition the communities of ``levels[l]`` (its
    canonical ids are the next level's meta-node ids); the composition is
    canonically relabeled.
    """
    if not levels:
        raise ValidationError("need at least one level")
    projected = levels[0].assignment
    for depth, part in enumerate(levels[1:], start=1):
        if len(part) != levels[depth - 1].num_communities:
            raise ValidationError(
                f"level {depth} has {len(part)} nodes but level {depth - 1} "
                f"has {levels[depth - 1].num_communities} communities")
        projected = part.assignment[projected]
    return Partition(projected)
