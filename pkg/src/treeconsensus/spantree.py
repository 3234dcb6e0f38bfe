"""Spanning-tree enumeration and the priority vectors trees induce.

Every spanning tree of a comparison graph is a minimal "basic set" of n-1
comparisons that connects all n alternatives. A tree determines a complete,
ideally consistent PCM by multiplying ratios along tree paths, and that matrix
determines a priority vector by normalizing any of its columns. Enumerating
all trees of every expert's graph is what lets incomplete and redundant
judgments contribute on an equal footing.

Enumeration is exact contraction/deletion: for a chosen edge, trees that use
it are the trees of the contracted graph, trees that avoid it are the trees of
the graph without it (pruned when deletion disconnects). Each tree is emitted
exactly once, in a deterministic order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import TreeLimitError
from .pcm import PCM, ComparisonGraph
from .scales import Scale

#: refuse exhaustive enumeration on complete graphs beyond this size
MAX_COMPLETE_N = 12

_CONSISTENCY_TOL = 1e-9
_COLUMN_TOL = 1e-9


@dataclass(frozen=True)
class SpanningTree:
    """A basic comparison set: n-1 valued edges spanning all alternatives."""

    expert: str
    index: int
    n: int
    edges: tuple[tuple[int, int, float, Scale], ...]

    def edge_scales(self) -> list[Scale]:
        return [scale for _, _, _, scale in self.edges]


@dataclass(frozen=True)
class ICPCM:
    """An ideally consistent PCM reconstructed from one tree (or an aggregate)."""

    matrix: np.ndarray
    source: tuple[str, int] | str

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def max_consistency_error(self) -> float:
        """Largest relative violation of a_ij * a_jl = a_il over all triples."""
        a = self.matrix
        # a_ij * a_jl for all (i, j, l) via broadcasting
        products = a[:, :, None] * a[None, :, :]
        target = a[:, None, :]
        return float(np.max(np.abs(products - target) / target))

    def is_consistent(self, tol: float = _CONSISTENCY_TOL) -> bool:
        return self.max_consistency_error() <= tol


@dataclass(frozen=True)
class PriorityVector:
    """Positive weights over the alternatives, normalized to sum 1."""

    w: np.ndarray
    source: tuple[str, int] | str = "aggregate"

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1 or w.size < 2:
            raise ValueError(f"priority vector needs >= 2 coordinates, got shape {w.shape}")
        if np.any(w <= 0):
            raise ValueError("priority coordinates must be strictly positive")
        w = w / w.sum()
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.w.size


def _connected(n_vertices: int, edges: list[tuple[int, int, int]], labels: set[int]) -> bool:
    if not labels:
        return True
    parent = {v: v for v in labels}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    merged = 1
    for u, v, _ in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[rv] = ru
            merged += 1
            if merged == len(labels):
                return True
    return merged == len(labels)


def spanning_edge_sets(graph: ComparisonGraph) -> list[tuple[tuple[int, int], ...]]:
    """All spanning trees of ``graph`` as sorted edge tuples.

    Returns [] for a disconnected graph. Refuses complete graphs with more
    than MAX_COMPLETE_N vertices: their n^(n-2) trees are beyond any use this
    engine has.
    """
    n = graph.n
    if len(graph.edges) == n * (n - 1) // 2 and n > MAX_COMPLETE_N:
        raise TreeLimitError(
            f"complete graph on {n} alternatives has {n}^{n - 2} spanning trees; "
            f"refusing to enumerate beyond n={MAX_COMPLETE_N}"
        )
    ordered = sorted(graph.edges)
    # edge records carry (current endpoint u, current endpoint v, original index)
    edges = [(i, j, idx) for idx, (i, j) in enumerate(ordered)]
    labels = set(range(n))
    if not _connected(n, edges, labels):
        return []

    results: list[tuple[tuple[int, int], ...]] = []
    chosen: list[int] = []

    def recurse(edges: list[tuple[int, int, int]], labels: set[int]) -> None:
        if len(labels) == 1:
            results.append(tuple(ordered[idx] for idx in sorted(chosen)))
            return
        u, v, idx = edges[0]
        # include the edge: contract v into u, dropping loops
        contracted = []
        for a, b, k in edges[1:]:
            a2 = u if a == v else a
            b2 = u if b == v else b
            if a2 != b2:
                contracted.append((a2, b2, k))
        chosen.append(idx)
        recurse(contracted, labels - {v})
        chosen.pop()
        # exclude the edge: only viable if the rest still connects
        rest = edges[1:]
        if _connected(len(labels), rest, labels):
            recurse(rest, labels)

    recurse(edges, labels)
    return results


@lru_cache(maxsize=32)
def _complete_graph_edge_sets(n: int) -> list[tuple[tuple[int, int], ...]]:
    edges = frozenset((i, j) for i in range(n) for j in range(i + 1, n))
    return spanning_edge_sets(ComparisonGraph(n, edges))


def enumerate_trees(pcm: PCM) -> list[SpanningTree]:
    """All spanning trees of one expert's comparison graph, with cell values.

    An expert whose graph is disconnected contributes no trees (empty list);
    completeness checking flags that case before any enumeration matters.
    """
    graph = pcm.graph()
    if len(graph.edges) == graph.n * (graph.n - 1) // 2:
        edge_sets = _complete_graph_edge_sets(graph.n)
    else:
        edge_sets = spanning_edge_sets(graph)
    trees = []
    for q, edge_set in enumerate(edge_sets):
        edges = tuple(
            (i, j, pcm.value(i, j), pcm.scale_at(i, j)) for i, j in edge_set
        )
        trees.append(SpanningTree(pcm.expert, q, pcm.n, edges))
    return trees


def _log_potentials(tree: SpanningTree) -> np.ndarray:
    """x with x_i - x_j = log a_ij along tree edges, rooted at vertex 0."""
    n = tree.n
    adjacency: dict[int, list[tuple[int, float]]] = {v: [] for v in range(n)}
    for i, j, value, _ in tree.edges:
        logv = np.log(value)
        adjacency[i].append((j, logv))
        adjacency[j].append((i, -logv))
    x = np.zeros(n)
    seen = [False] * n
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        u = stack.pop()
        for v, logv in adjacency[u]:
            if not seen[v]:
                # x_u - x_v = log a_uv  =>  x_v = x_u - log a_uv
                x[v] = x[u] - logv
                seen[v] = True
                count += 1
                stack.append(v)
    if count != n:
        raise ValueError("edges do not span all alternatives")
    return x


def reconstruct_icpcm(tree: SpanningTree) -> ICPCM:
    """Complete the tree into a consistent matrix via path products.

    Entry (i, j) is the product of edge ratios along the unique tree path from
    i to j; computed in log domain so long paths stay exact to rounding.
    """
    x = _log_potentials(tree)
    matrix = np.exp(x[:, None] - x[None, :])
    return ICPCM(matrix, (tree.expert, tree.index))


def tree_priorities(tree: SpanningTree) -> PriorityVector:
    """Priority vector of a tree without materializing its full matrix."""
    x = _log_potentials(tree)
    e = np.exp(x - x.max())
    return PriorityVector(e / e.sum(), (tree.expert, tree.index))


def priorities_from_icpcm(icpcm: ICPCM) -> PriorityVector:
    """Normalize a reference column of a consistent matrix into priorities.

    For an ideally consistent matrix every column normalizes to the same
    vector; the spread across columns is checked and must stay below 1e-9.
    """
    a = icpcm.matrix
    columns = a / a.sum(axis=0, keepdims=True)
    spread = float(np.max(np.abs(columns - columns[:, [0]])))
    if spread > _COLUMN_TOL:
        raise ValueError(
            f"matrix is not consistent: column choice changes priorities by {spread:.2e}"
        )
    return PriorityVector(columns[:, 0], icpcm.source)
