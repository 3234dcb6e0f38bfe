"""Individual incomplete pairwise comparison matrices and group completeness.

A PCM stores one expert's ratio estimates over n alternatives in the unified
scale. Cells are optional; whenever (i, j) is present so is (j, i) with the
reciprocal value, the diagonal is implicitly 1, and every value is strictly
positive. Alternative indices are 0-based positions into the session's
alternatives list.

Completeness of a group of PCMs is a connectivity question: priorities can be
derived as soon as the union of the experts' comparison graphs connects all
alternatives, even if every individual matrix is sparse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidJudgmentError, JudgmentConflictError
from .scales import Scale, UnifiedScale, to_unified

#: direction marker: ">" means alternative i dominates j, "<" the opposite
DIRECTIONS = (">", "<")

_REL_TOL = 1e-9


@dataclass(frozen=True)
class Judgment:
    """A single pairwise comparison as an expert entered it (original scale)."""

    expert: str
    i: int
    j: int
    grade: float
    scale: Scale
    direction: str = ">"

    def __post_init__(self):
        if self.i == self.j:
            raise InvalidJudgmentError(f"self-comparison ({self.i}, {self.i})")
        if self.i < 0 or self.j < 0:
            raise InvalidJudgmentError(f"negative alternative index in ({self.i}, {self.j})")
        if self.direction not in DIRECTIONS:
            raise InvalidJudgmentError(f"direction must be one of {DIRECTIONS}")
        if not (1 <= self.grade <= self.scale.grades):
            raise InvalidJudgmentError(
                f"grade {self.grade} outside 1..{self.scale.grades} "
                f"for pair ({self.i}, {self.j})"
            )


class PCM:
    """One expert's reciprocal, multiplicative, possibly incomplete matrix."""

    __slots__ = ("n", "expert", "_cells")

    def __init__(self, n: int, expert: str, cells: dict[tuple[int, int], tuple[float, Scale]]):
        if n < 2:
            raise InvalidJudgmentError(f"need at least 2 alternatives, got {n}")
        self.n = n
        self.expert = expert
        self._cells = cells

    @classmethod
    def empty(cls, n: int, expert: str) -> "PCM":
        return cls(n, expert, {})

    def value(self, i: int, j: int) -> float | None:
        """Ratio a_ij, 1.0 on the diagonal, None when the cell is missing."""
        if i == j:
            return 1.0
        cell = self._cells.get((i, j))
        return cell[0] if cell else None

    def scale_at(self, i: int, j: int) -> Scale | None:
        cell = self._cells.get((i, j))
        return cell[1] if cell else None

    def has_cell(self, i: int, j: int) -> bool:
        return (i, j) in self._cells

    def upper_triangle(self) -> Iterator[tuple[int, int, float, Scale]]:
        """Present cells (i, j, a_ij, scale) with i < j, in index order."""
        for (i, j), (value, scale) in sorted(self._cells.items()):
            if i < j:
                yield i, j, value, scale

    def upper_triangle_scales(self) -> list[Scale]:
        return [scale for _, _, _, scale in self.upper_triangle()]

    def pair_count(self) -> int:
        return len(self._cells) // 2

    def is_complete(self) -> bool:
        return self.pair_count() == self.n * (self.n - 1) // 2

    def with_cell(self, i: int, j: int, value: float, scale: Scale) -> "PCM":
        """A copy with cell (i, j) set to ``value`` (reciprocal mirrored)."""
        if i == j:
            raise InvalidJudgmentError("cannot set a diagonal cell")
        if value <= 0:
            raise InvalidJudgmentError(f"ratio must be positive, got {value}")
        cells = dict(self._cells)
        cells[(i, j)] = (value, scale)
        cells[(j, i)] = (1.0 / value, scale)
        return PCM(self.n, self.expert, cells)

    def to_array(self, fill: float = np.nan) -> np.ndarray:
        """Dense n x n array with ``fill`` in missing cells and 1 on the diagonal."""
        a = np.full((self.n, self.n), fill, dtype=float)
        np.fill_diagonal(a, 1.0)
        for (i, j), (value, _) in self._cells.items():
            a[i, j] = value
        return a

    def graph(self) -> "ComparisonGraph":
        edges = frozenset((i, j) for (i, j) in self._cells if i < j)
        return ComparisonGraph(self.n, edges)

    def __repr__(self):
        return f"PCM(n={self.n}, expert={self.expert!r}, pairs={self.pair_count()})"


def build_pcm(judgments: Iterable[Judgment], n: int, unified: UnifiedScale,
              expert: str | None = None) -> PCM:
    """Assemble a PCM from raw judgments, converting grades to the unified scale.

    Reciprocals are auto-filled. Duplicate judgments for one unordered pair are
    accepted only if they agree after conversion; a disagreement raises
    JudgmentConflictError naming the pair (the feedback loop, not resubmission,
    is the channel for changing one's mind).
    """
    cells: dict[tuple[int, int], tuple[float, Scale]] = {}
    owner = expert
    for judgment in judgments:
        if owner is None:
            owner = judgment.expert
        elif judgment.expert != owner:
            raise InvalidJudgmentError(
                f"judgment by {judgment.expert!r} in PCM of {owner!r}"
            )
        if not (0 <= judgment.i < n and 0 <= judgment.j < n):
            raise InvalidJudgmentError(
                f"pair ({judgment.i}, {judgment.j}) outside 0..{n - 1}"
            )
        ratio = float(to_unified(judgment.grade, judgment.scale, unified))
        if judgment.direction == "<":
            ratio = 1.0 / ratio
        i, j = judgment.i, judgment.j
        existing = cells.get((i, j))
        if existing is not None:
            if abs(existing[0] - ratio) > _REL_TOL * existing[0]:
                raise JudgmentConflictError(owner, min(i, j), max(i, j))
            continue
        cells[(i, j)] = (ratio, judgment.scale)
        cells[(j, i)] = (1.0 / ratio, judgment.scale)
    return PCM(n, owner if owner is not None else "", cells)


@dataclass(frozen=True)
class ComparisonGraph:
    """Undirected graph of compared pairs; vertices are alternative indices."""

    n: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def union(cls, graphs: Sequence["ComparisonGraph"]) -> "ComparisonGraph":
        if not graphs:
            raise ValueError("union of no graphs")
        n = graphs[0].n
        if any(g.n != n for g in graphs):
            raise ValueError("graphs cover different alternative counts")
        return cls(n, frozenset().union(*(g.edges for g in graphs)))

    def components(self) -> list[list[int]]:
        """Connected components, each sorted, ordered by lowest vertex."""
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.edges:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[rj] = ri
        groups: dict[int, list[int]] = {}
        for v in range(self.n):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values(), key=lambda c: c[0])

    def is_connected(self) -> bool:
        return len(self.components()) == 1


@dataclass(frozen=True)
class CompletenessReport:
    """Connectivity of each expert's graph and of the group union graph."""

    connected: dict[str, bool]
    union_connected: bool
    components: list[list[int]]
    suggested_edges: list[tuple[int, int]]

    @property
    def complete(self) -> bool:
        return self.union_connected


def check_completeness(pcms: Sequence[PCM]) -> CompletenessReport:
    """Decide whether the group's combined comparisons span all alternatives.

    The union graph must be connected for any priority vector to exist. When
    it is not, ``suggested_edges`` joins the components pairwise through their
    lowest-index vertices; asking any expert for those comparisons restores
    completeness.
    """
    if not pcms:
        raise ValueError("no PCMs to check")
    n = pcms[0].n
    if any(p.n != n for p in pcms):
        raise ValueError("PCMs cover different alternative counts")
    graphs = [p.graph() for p in pcms]
    union = ComparisonGraph.union(graphs)
    components = union.components()
    suggested: list[tuple[int, int]] = []
    if len(components) > 1:
        anchor = components[0][0]
        suggested = [(anchor, comp[0]) for comp in components[1:]]
    return CompletenessReport(
        connected={p.expert: g.is_connected() for p, g in zip(pcms, graphs)},
        union_connected=len(components) == 1,
        components=components,
        suggested_edges=suggested,
    )
