"""Instruments that quantify how much the detected communities depend on
the run itself: seed ensembles with partition-similarity and
co-classification statistics, an exhaustive small-graph oracle, and the
ring-of-cliques probe for the resolution limit.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import SizeLimitError, UndefinedModularityError, ValidationError
from .graph import Graph, Partition, ring_of_cliques
from .louvain import louvain
from .modularity import EPS_GAIN, modularity
from .rng import generator

__all__ = [
    "BRUTE_FORCE_MAX_NODES",
    "DiagnosticsReport",
    "EnsembleRun",
    "ResolutionProbeReport",
    "brute_force_best_partition",
    "partition_similarity",
    "resolution_probe",
    "run_ensemble",
    "set_partitions",
]

BRUTE_FORCE_MAX_NODES = 12
COCLASSIFICATION_CAP = 5000

METRICS = ("NMI", "ARI", "VI")

# self-similarity value per metric (pairwise matrix diagonal)
_SELF_SIMILARITY = {"NMI": 1.0, "ARI": 1.0, "VI": 0.0}


# ---------------------------------------------------------------------------
# partition comparison metrics
# ---------------------------------------------------------------------------

def _contingency(p1: Partition, p2: Partition) -> np.ndarray:
    k1, k2 = p1.num_communities, p2.num_communities
    joint = p1.assignment * k2 + p2.assignment
    return np.bincount(joint, minlength=k1 * k2).reshape(k1, k2).astype(np.float64)


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def _mutual_information(table: np.ndarray, n: int) -> float:
    nz = table > 0
    pij = table[nz] / n
    outer = np.outer(table.sum(axis=1), table.sum(axis=0))[nz] / (n * n)
    return float((pij * np.log(pij / outer)).sum())


def partition_similarity(p1: Partition, p2: Partition, metric: str = "NMI") -> float:
    """Compare two partitions of the same node set.

    Metrics (natural-log entropies throughout):

    * ``NMI``: mutual information normalized by the arithmetic mean of the
      two entropies, ``I / ((H1 + H2) / 2)``, in [0, 1].  Two identical
      constant partitions compare as 1.
    * ``ARI``: pair-counting Rand index adjusted for chance, <= 1.
    * ``VI``: variation of information ``H1 + H2 - 2 I``, >= 0, a metric
      on the partition lattice.
    """
    if len(p1) != len(p2):
        raise ValidationError(
            f"partition lengths differ: {len(p1)} vs {len(p2)}")
    if metric not in METRICS:
        raise ValidationError(f"unknown metric {metric!r}; choose from {METRICS}")
    n = len(p1)
    if n == 0:
        raise ValidationError("cannot compare empty partitions")
    table = _contingency(p1, p2)
    h1 = _entropy(table.sum(axis=1), n)
    h2 = _entropy(table.sum(axis=0), n)
    mi = _mutual_information(table, n)

    if metric == "VI":
        return max(0.0, h1 + h2 - 2.0 * mi)
    if metric == "NMI":
        if h1 == 0.0 and h2 == 0.0:
            return 1.0
        mean_h = 0.5 * (h1 + h2)
        return min(1.0, max(0.0, mi / mean_h))
    # ARI
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    comb = lambda x: x * (x - 1.0) / 2.0
    index = comb(table).sum()
    sum_a = comb(a).sum()
    sum_b = comb(b).sum()
    total = comb(float(n))
    expected = sum_a * sum_b / total if total else 0.0
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))


# ---------------------------------------------------------------------------
# seed ensembles
# ---------------------------------------------------------------------------

class EnsembleRun(NamedTuple):
    seed: int
    q: float
    num_communities: int
    sizes: tuple[int, ...]


@dataclass(frozen=True)
class DiagnosticsReport:
    """Ensemble statistics over one detection run per seed.

    ``pairwise`` is the R x R similarity matrix between run partitions
    for ``metric``; ``coclassification[i, j]`` is the fraction of runs in
    which nodes i and j share a community (full matrix for graphs up to
    the materialization cap, otherwise restricted to the sampled node ids
    in ``coclassification_nodes``).
    """

    runs: tuple[EnsembleRun, ...]
    partitions: tuple[Partition, ...]
    metric: str
    pairwise: np.ndarray
    coclassification: np.ndarray
    coclassification_nodes: np.ndarray
    summary: dict

    def to_json_dict(self) -> dict:
        """JSON-ready view (co-classification matrix excluded for size)."""
        return {
            "metric": self.metric,
            "runs": [
                {"seed": r.seed, "q": r.q, "communities": r.num_communities,
                 "sizes": list(r.sizes)}
                for r in self.runs
            ],
            "pairwise": [[float(x) for x in row] for row in self.pairwise],
            "coclassification_sampled": len(self.coclassification_nodes) < len(self.partitions[0]),
            "summary": self.summary,
        }


def _single_run(args):
    g, seed = args
    res = louvain(g, seed=seed)
    return res.partition, res.q_trace[-1] if res.q_trace else modularity(g, res.partition)


def run_ensemble(g: Graph, seeds: Sequence[int], *, metric: str = "NMI",
                 coclassification_cap: int = COCLASSIFICATION_CAP,
                 jobs: int = 1) -> DiagnosticsReport:
    """One detection run per seed, with cross-run comparison statistics.

    Deterministic given (graph, seeds); runs execute in parallel when
    ``jobs`` > 1 (each run owns its state, the graph is shared read-only).
    """
    seeds = [int(s) for s in seeds]
    if len(seeds) < 2:
        raise ValidationError("an ensemble needs at least 2 seeds")
    if metric not in METRICS:
        raise ValidationError(f"unknown metric {metric!r}; choose from {METRICS}")

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_single_run, [(g, s) for s in seeds]))
    else:
        outcomes = [_single_run((g, s)) for s in seeds]

    partitions = tuple(p for p, _ in outcomes)
    runs = tuple(
        EnsembleRun(seed=s, q=float(q), num_communities=p.num_communities,
                    sizes=p.sizes)
        for s, (p, q) in zip(seeds, outcomes))

    r = len(seeds)
    pairwise = np.empty((r, r))
    for i in range(r):
        pairwise[i, i] = _SELF_SIMILARITY[metric]
        for j in range(i + 1, r):
            pairwise[i, j] = pairwise[j, i] = partition_similarity(
                partitions[i], partitions[j], metric)

    if g.n <= coclassification_cap:
        node_ids = np.arange(g.n)
    else:
        node_ids = np.sort(generator(seeds[0], g.n, coclassification_cap).choice(
            g.n, size=coclassification_cap, replace=False))
    co = np.zeros((node_ids.size, node_ids.size))
    for p in partitions:
        sub = p.assignment[node_ids]
        co += sub[:, None] == sub[None, :]
    co /= r

    off_diagonal = pairwise[~np.eye(r, dtype=bool)]
    qs = np.array([run.q for run in runs])
    summary = {
        "q": {"mean": float(qs.mean()), "min": float(qs.min()), "max": float(qs.max())},
        "similarity": {"mean": float(off_diagonal.mean()),
                       "min": float(off_diagonal.min()),
                       "max": float(off_diagonal.max())},
        "communities": {"min": int(min(run.num_communities for run in runs)),
                        "max": int(max(run.num_communities for run in runs))},
    }
    return DiagnosticsReport(runs=runs, partitions=partitions, metric=metric,
                             pairwise=pairwise, coclassification=co,
                             coclassification_nodes=node_ids, summary=summary)


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------

def set_partitions(n: int):
    """Yield every set partition of range(n) as an assignment array, in
    restricted-growth-string order (no duplicates by construction).

    A valid string satisfies a[0] = 0 and a[i] <= 1 + max(a[:i]); the
    successor increments the rightmost position below its ceiling and
    zeroes the tail.
    """
    if n <= 0:
        return
    a = [0] * n
    mx = [0] * n  # mx[i] = max(a[:i+1])
    while True:
        yield np.array(a, dtype=np.int64)
        j = n - 1
        while j > 0 and a[j] > mx[j - 1]:
            j -= 1
        if j == 0:
            return
        a[j] += 1
        mx[j] = mx[j - 1] if mx[j - 1] >= a[j] else a[j]
        for i in range(j + 1, n):
            a[i] = 0
            mx[i] = mx[j]


def brute_force_best_partition(g: Graph) -> tuple[Partition, float]:
    """Exhaustive modularity maximum over all set partitions.

    Guarded at 12 nodes (Bell(12) = 4,213,597 candidates).  Ties keep the
    first maximum in enumeration order, then relabel canonically.
    """
    if g.n > BRUTE_FORCE_MAX_NODES:
        raise SizeLimitError(
            f"exhaustive search is capped at {BRUTE_FORCE_MAX_NODES} nodes, got {g.n}")
    if g.total_weight <= 0.0:
        raise UndefinedModularityError(
            "modularity is undefined for a graph with zero total edge weight")

    u, v, w = g.edge_arrays()
    eu, ev, ew = u.tolist(), v.tolist(), w.tolist()
    degrees = g.degrees.tolist()
    inv_two_m = 1.0 / (2.0 * g.total_weight)

    best_q = -np.inf
    best = None
    for assignment in set_partitions(g.n):
        comm = assignment.tolist()
        sigma_in = [0.0] * g.n
        sigma_tot = [0.0] * g.n
        for i, d in enumerate(degrees):
            sigma_tot[comm[i]] += d
        for a, b, c in zip(eu, ev, ew):
            if comm[a] == comm[b]:
                sigma_in[comm[a]] += 2.0 * c
        q = 0.0
        for inn, tot in zip(sigma_in, sigma_tot):
            if tot:
                q += inn * inv_two_m - (tot * inv_two_m) ** 2
        if q > best_q:
            best_q = q
            best = assignment
    return Partition(best), float(best_q)


# ---------------------------------------------------------------------------
# resolution-limit probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResolutionProbeReport:
    """Outcome of the ring-of-cliques probe.

    ``limit_manifested`` flags the regime where merging adjacent cliques
    scores higher than one community per clique, i.e. where the quality
    function can no longer resolve the individual cliques.
    """

    c: int
    k: int
    q_singleton_cliques: float
    q_merged_pairs: float
    louvain_community_count: int
    limit_manifested: bool

    def to_json_dict(self) -> dict:
        return {
            "cliques": self.c,
            "clique_size": self.k,
            "q_singleton_cliques": self.q_singleton_cliques,
            "q_merged_pairs": self.q_merged_pairs,
            "louvain_community_count": self.louvain_community_count,
            "limit_manifested": self.limit_manifested,
        }


def resolution_probe(c: int, k: int, seed: int = 0) -> ResolutionProbeReport:
    """Evaluate the two analytic ring partitions and one detection run.

    The one-community-per-clique partition is compared against adjacent
    cliques merged in pairs (for odd ``c`` the last clique stays alone);
    the comparison uses the package-wide gain threshold so the exact tie
    at the crossover ring size stays "not manifested".
    """
    g = ring_of_cliques(c, k)
    clique_of = np.arange(c * k, dtype=np.int64) // k
    q_single = modularity(g, Partition(clique_of))
    q_merged = modularity(g, Partition(clique_of // 2))
    result = louvain(g, seed=seed)
    return ResolutionProbeReport(
        c=c, k=k,
        q_singleton_cliques=float(q_single),
        q_merged_pairs=float(q_merged),
        louvain_community_count=result.num_communities,
        limit_manifested=bool(q_merged > q_single + EPS_GAIN),
    )
