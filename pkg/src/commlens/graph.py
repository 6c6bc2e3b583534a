"""Graph data model: parsing, construction, generators and aggregation.

Graphs are undirected, weighted and immutable, stored in compressed
sparse row (CSR) form over dense node indices ``0..N-1``.  Original
input labels (arbitrary strings or integers) are kept in a label table
and used for all external output.

Self-loop convention: a self-loop of weight ``w`` is stored once and
contributes ``2w`` to the node degree and ``2w`` to the implicit
diagonal adjacency entry.  This makes modularity invariant under
meta-graph aggregation (intra-community weight becomes a self-loop of
the meta-node).
"""

from __future__ import annotations

import io
from typing import Iterable, NamedTuple, TextIO

import numpy as np

from .errors import ParseError, ValidationError
from .rng import generator

__all__ = [
    "Graph",
    "Partition",
    "MetaGraph",
    "ParseResult",
    "parse_edge_list",
    "load_edge_list",
    "aggregate",
    "ring_of_cliques",
    "random_graph",
    "label_sort_key",
]


def label_sort_key(label: str):
    """Sort key for node labels: numeric labels first in numeric order,
    then the rest lexicographically."""
    try:
        return (0, int(label), "")
    except ValueError:
        return (1, 0, label)


class Graph:
    """Immutable undirected weighted graph in CSR adjacency form.

    Attributes
    ----------
    n : int
        Node count.
    total_weight : float
        Sum of edge weights, each stored edge counted once (equals the
        edge count for unweighted input).
    indptr, indices, weights : ndarray
        CSR adjacency; neighbor lists are sorted.  A self-loop appears
        once, in its own row.
    degrees : ndarray
        Weighted degrees; a self-loop of weight w contributes 2w.
    labels : tuple of str
        Dense index -> original label.
    """

    __slots__ = ("n", "total_weight", "indptr", "indices", "weights",
                 "degrees", "labels", "_label_index")

    def __init__(self, n, indptr, indices, weights, labels):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        self.labels = tuple(labels)
        if len(self.labels) != self.n:
            raise ValidationError(
                f"label table has {len(self.labels)} entries for {self.n} nodes")
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._label_index) != self.n:
            raise ValidationError("node labels are not unique")

        degrees = np.zeros(self.n, dtype=np.float64)
        np.add.at(degrees, np.repeat(np.arange(self.n), np.diff(indptr)), weights)
        # self-loop rows carry the loop once; add its weight again for A_ii = 2w
        loop_mask = indices == np.repeat(np.arange(self.n), np.diff(indptr))
        np.add.at(degrees, indices[loop_mask], weights[loop_mask])
        self.degrees = degrees

        # each non-loop edge appears in two rows, each loop once
        self.total_weight = float(degrees.sum()) / 2.0

        for arr in (self.indptr, self.indices, self.weights, self.degrees):
            arr.setflags(write=False)

    # -- construction -------------------------------------------------

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str, float]],
                   node_order: Iterable[str] = ()) -> tuple["Graph", int]:
        """Build a graph from (u_label, v_label, weight) triples.

        Dense indices follow first appearance order; labels listed in
        ``node_order`` are registered first, which both pins their dense
        order and includes isolated nodes that appear in no edge.
        Duplicate edges (in either orientation) are merged by summing
        weights; the number of merged duplicates is returned alongside
        the graph.
        """
        label_index: dict[str, int] = {}
        merged: dict[tuple[int, int], float] = {}
        duplicates = 0

        def dense(label: str) -> int:
            idx = label_index.get(label)
            if idx is None:
                idx = len(label_index)
                label_index[label] = idx
            return idx

        for lab in node_order:
            dense(str(lab))
        for u_lab, v_lab, w in edges:
            w = float(w)
            if not np.isfinite(w) or w < 0:
                raise ValidationError(f"edge ({u_lab}, {v_lab}) has invalid weight {w}")
            u, v = dense(str(u_lab)), dense(str(v_lab))
            key = (u, v) if u <= v else (v, u)
            if key in merged:
                merged[key] += w
                duplicates += 1
            else:
                merged[key] = w

        n = len(label_index)
        rows: list[int] = []
        cols: list[int] = []
        vals: list[float] = []
        for (u, v), w in merged.items():
            rows.append(u)
            cols.append(v)
            vals.append(w)
            if u != v:
                rows.append(v)
                cols.append(u)
                vals.append(w)

        row_arr = np.asarray(rows, dtype=np.int64)
        col_arr = np.asarray(cols, dtype=np.int64)
        val_arr = np.asarray(vals, dtype=np.float64)
        order = np.lexsort((col_arr, row_arr))
        row_arr, col_arr, val_arr = row_arr[order], col_arr[order], val_arr[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, row_arr + 1, 1)
        np.cumsum(indptr, out=indptr)

        labels = [None] * n
        for lab, i in label_index.items():
            labels[i] = lab
        return cls(n, indptr, col_arr, val_arr, labels), duplicates

    # -- queries ------------------------------------------------------

    def degree(self, i: int) -> float:
        """Weighted degree of node i (self-loop counts twice)."""
        if not 0 <= i < self.n:
            raise IndexError(f"node {i} out of range [0, {self.n})")
        return float(self.degrees[i])

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """(neighbor indices, weights) slice for node i."""
        if not 0 <= i < self.n:
            raise IndexError(f"node {i} out of range [0, {self.n})")
        s, e = self.indptr[i], self.indptr[i + 1]
        return self.indices[s:e], self.weights[s:e]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u, v, w) arrays with u <= v, each stored edge exactly once."""
        row = np.repeat(np.arange(self.n), np.diff(self.indptr))
        keep = self.indices >= row
        return row[keep], self.indices[keep], self.weights[keep]

    @property
    def num_edges(self) -> int:
        """Number of stored edges (self-loops count once)."""
        row = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return int(np.count_nonzero(self.indices >= row))

    def dense_index(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n
                and self.labels == other.labels
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash((self.n, self.labels, self.weights.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.total_weight:g})"

    # -- derived graphs -----------------------------------------------

    def with_added_edges(self, pairs: Iterable[tuple[int, int]],
                         weight: float = 1.0) -> "Graph":
        """New graph with the given (dense u, dense v) edges added.

        Pairs must be absent from the graph; duplicates raise.
        """
        u0, v0, w0 = self.edge_arrays()
        edges = [(self.labels[u], self.labels[v], w)
                 for u, v, w in zip(u0, v0, w0)]
        for u, v in pairs:
            edges.append((self.labels[u], self.labels[v], weight))
        g, dups = Graph.from_edges(edges, node_order=self.labels)
        if dups:
            raise ValidationError(f"{dups} added edge(s) already present")
        return g

    # -- serialization ------------------------------------------------

    def to_edge_list_text(self) -> str:
        """Serialize as edge-list text that round-trips through the parser.

        Edges are written in dense (u, v) order so that reparsing assigns
        identical dense indices; weights use shortest round-trip decimals.
        """
        u, v, w = self.edge_arrays()
        lines = [f"{self.labels[a]} {self.labels[b]} {repr(float(c))}"
                 for a, b, c in zip(u, v, w)]
        return "\n".join(lines) + ("\n" if lines else "")


class ParseResult(NamedTuple):
    graph: Graph
    duplicates: int


def parse_edge_list(source: str | bytes | TextIO) -> ParseResult:
    """Parse whitespace-separated ``u v [w]`` edge-list text.

    Lines starting with ``#`` are comments, blank lines are ignored and a
    missing weight defaults to 1.0.  ``u v`` and ``v u`` name the same
    edge; duplicate edges merge by summing weights and are counted in the
    returned ``duplicates`` field.

    Raises
    ------
    ParseError
        Fewer than two fields, more than three, or a non-numeric weight
        (reported with the 1-based line number).
    ValidationError
        Negative or non-finite weight.
    """
    if isinstance(source, bytes):
        stream: TextIO = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        stream = io.StringIO(source)
    else:
        stream = source

    edges: list[tuple[str, str, float]] = []
    for lineno, line in enumerate(stream, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) < 2:
            raise ParseError(f"expected 'u v [w]', got {stripped!r}", lineno)
        if len(fields) > 3:
            raise ParseError(f"too many fields in {stripped!r}", lineno)
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise ParseError(f"non-numeric weight {fields[2]!r}", lineno) from None
        else:
            w = 1.0
        if not np.isfinite(w) or w < 0:
            raise ValidationError(f"line {lineno}: negative or non-finite weight {w}")
        edges.append((fields[0], fields[1], w))

    graph, duplicates = Graph.from_edges(edges)
    return ParseResult(graph, duplicates)


def load_edge_list(path) -> ParseResult:
    """Parse an edge-list file from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh)


class Partition:
    """Assignment of every node to exactly one community.

    Community ids are canonical: consecutive integers from 0, ordered by
    descending community size with ties broken by smallest member index.
    """

    __slots__ = ("assignment", "num_communities", "sizes")

    def __init__(self, assignment):
        raw = np.asarray(assignment, dtype=np.int64)
        if raw.ndim != 1:
            raise ValidationError("assignment must be one-dimensional")
        if raw.size and raw.min() < 0:
            raise ValidationError("community ids must be non-negative")
        uniq, first, inverse, counts = np.unique(
            raw, return_index=True, return_inverse=True, return_counts=True)
        order = np.lexsort((first, -counts))
        rank = np.empty_like(order)
        rank[order] = np.arange(order.size)
        self.assignment = rank[inverse].astype(np.int64)
        self.assignment.setflags(write=False)
        self.num_communities = int(uniq.size)
        self.sizes = tuple(int(c) for c in counts[order])

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(np.arange(n, dtype=np.int64))

    @classmethod
    def all_in_one(cls, n: int) -> "Partition":
        return cls(np.zeros(n, dtype=np.int64))

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == c)

    def __len__(self):
        return self.assignment.size

    def __getitem__(self, i):
        return int(self.assignment[i])

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    def __hash__(self):
        return hash(self.assignment.tobytes())

    def __repr__(self):
        return f"Partition(n={len(self)}, communities={self.num_communities})"

    # -- TSV interchange ----------------------------------------------

    def to_tsv(self, g: Graph) -> str:
        """``original_label<TAB>community_id`` lines, sorted by label."""
        if len(self) != g.n:
            raise ValidationError(f"partition length {len(self)} != node count {g.n}")
        order = sorted(range(g.n), key=lambda i: label_sort_key(g.labels[i]))
        return "".join(f"{g.labels[i]}\t{self.assignment[i]}\n" for i in order)

    @classmethod
    def from_tsv(cls, text: str, g: Graph) -> "Partition":
        """Parse a partition TSV against the node set of ``g``.

        The label set must match the graph's exactly.
        """
        seen: dict[str, int] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t") if "\t" in line else line.split()
            if len(fields) != 2:
                raise ParseError(f"expected 'label<TAB>community', got {line!r}", lineno)
            label, cid = fields[0].strip(), fields[1].strip()
            try:
                community = int(cid)
            except ValueError:
                raise ParseError(f"non-integer community id {cid!r}", lineno) from None
            if label in seen:
                raise ParseError(f"duplicate label {label!r}", lineno)
            seen[label] = community

        missing = set(g.labels) - set(seen)
        extra = set(seen) - set(g.labels)
        if missing or extra:
            raise ValidationError(
                f"partition node set mismatch: {len(missing)} missing, {len(extra)} unknown")
        assignment = np.array([seen[lab] for lab in g.labels], dtype=np.int64)
        return cls(assignment)


class MetaGraph(NamedTuple):
    """Aggregated graph whose nodes are the communities of a partition."""

    graph: Graph
    members: tuple[tuple[int, ...], ...]


def aggregate(g: Graph, p: Partition) -> MetaGraph:
    """Collapse each community of ``p`` into a meta-node.

    Intra-community weight becomes the meta-node's self-loop (stored
    weight = summed intra weight, hence diagonal 2w), inter-community
    weight becomes meta-edges.  Total weight is preserved.
    """
    if len(p) != g.n:
        raise ValidationError(f"partition length {len(p)} != node count {g.n}")
    k = p.num_communities
    u, v, w = g.edge_arrays()
    cu = p.assignment[u]
    cv = p.assignment[v]
    lo = np.minimum(cu, cv)
    hi = np.maximum(cu, cv)
    keys = lo * k + hi
    agg: dict[int, float] = {}
    for key, weight in zip(keys.tolist(), w.tolist()):
        agg[key] = agg.get(key, 0.0) + weight

    edges = [(str(key // k), str(key % k), weight)
             for key, weight in sorted(agg.items())]
    meta, _ = Graph.from_edges(edges, node_order=[str(c) for c in range(k)])
    members = tuple(tuple(int(i) for i in p.members(c)) for c in range(k))
    return MetaGraph(meta, members)


def ring_of_cliques(c: int, k: int) -> Graph:
    """``c`` complete graphs K_k in a ring, adjacent cliques joined by one
    bridge between gateway nodes.

    Node ``q*k + j`` is member j of clique q; the bridge from clique q
    runs from its node 1 to node 0 of clique q+1 (mod c), so every node
    has degree k-1 (interior) or k (gateway).
    """
    if c < 3:
        raise ValidationError(f"need at least 3 cliques, got {c}")
    if k < 3:
        raise ValidationError(f"need cliques of at least 3 nodes, got {k}")
    edges = []
    for q in range(c):
        base = q * k
        for a in range(k):
            for b in range(a + 1, k):
                edges.append((str(base + a), str(base + b), 1.0))
        edges.append((str(base + 1), str(((q + 1) % c) * k), 1.0))
    g, _ = Graph.from_edges(edges, node_order=[str(i) for i in range(c * k)])
    return g


def random_graph(n: int, edge_probability: float, seed: int) -> Graph:
    """G(n, p): each unordered pair independently with the given probability.

    Deterministic for a fixed seed (PCG64 stream, row-major pair order).
    """
    if n < 1:
        raise ValidationError(f"need at least one node, got {n}")
    if not 0.0 <= edge_probability <= 1.0:
        raise ValidationError(f"edge probability {edge_probability} outside [0, 1]")
    rng = generator(seed)
    edges = []
    for i in range(n - 1):
        draws = rng.random(n - 1 - i)
        for off in np.flatnonzero(draws < edge_probability):
            edges.append((str(i), str(i + 1 + int(off)), 1.0))
    g, _ = Graph.from_edges(edges, node_order=[str(i) for i in range(n)])
    return g
