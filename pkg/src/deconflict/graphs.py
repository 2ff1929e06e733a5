"""Preference graphs: judgment matrices, graph construction, conflict detection.

A group of G candidate responses yields a G-by-G antisymmetric judgment
matrix over {-1, 0, +1}; the +1 cells induce a semicomplete digraph whose
directed cycles are exactly the logical conflicts we care about. Conflict
detection reduces to finding a strongly connected component of size > 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from ._kernels import tarjan_scc_labels
from .errors import ValidationError

Edge = tuple[int, int]


def _as_matrix_array(entries) -> np.ndarray:
    arr = np.asarray(entries)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"judgment matrix must be square, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValidationError("judgment matrix needs at least one response")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValidationError("judgment matrix entries must be integers")
    return arr.astype(np.int8)


@dataclass(frozen=True)
class ComparisonMatrix:
    """Antisymmetric G-by-G verdict matrix; entries[i][j] = +1 iff i beat j."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _as_matrix_array(self.entries)
        g = arr.shape[0]
        for i in range(g):
            if arr[i, i] != 0:
                raise ValidationError(f"diagonal cell ({i}, {i}) must be 0, got {arr[i, i]}")
        bad = np.argwhere((arr < -1) | (arr > 1))
        if bad.size:
            i, j = map(int, bad[0])
            raise ValidationError(
                f"cell ({i}, {j}) holds {int(arr[i, j])}; entries must be -1, 0, or +1"
            )
        skew = np.argwhere(arr != -arr.T)
        if skew.size:
            i, j = map(int, skew[0])
            raise ValidationError(
                f"cells ({i}, {j}) and ({j}, {i}) violate antisymmetry: "
                f"{int(arr[i, j])} vs {int(arr[j, i])}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def g(self) -> int:
        return int(self.entries.shape[0])

    def permuted(self, perm: Sequence[int]) -> "ComparisonMatrix":
        """Relabel responses: row/column i of the result is perm[i] of the original."""
        p = np.asarray(perm)
        return ComparisonMatrix(self.entries[np.ix_(p, p)])

    def to_lists(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.entries]


@dataclass(frozen=True)
class PreferenceGraph:
    """Semicomplete digraph over response indices; edge (i, j) means i beat j."""

    g: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.g < 0:
            raise ValidationError(f"vertex count must be non-negative, got {self.g}")
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        for u, v in edges:
            if u == v:
                raise ValidationError(f"self-loop on vertex {u}")
            if not (0 <= u < self.g and 0 <= v < self.g):
                raise ValidationError(f"edge ({u}, {v}) out of range for g={self.g}")
            if (v, u) in edges:
                raise ValidationError(f"both ({u}, {v}) and ({v}, {u}) present")
        object.__setattr__(self, "edges", edges)

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.g, self.g), dtype=np.uint8)
        for u, v in self.edges:
            adj[u, v] = 1
        return adj

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def without_edges(self, removed: Iterable[Edge]) -> "PreferenceGraph":
        return PreferenceGraph(self.g, self.edges - frozenset(removed))

    def with_edge_reversed(self, edge: Edge) -> "PreferenceGraph":
        u, v = edge
        if edge not in self.edges:
            raise ValidationError(f"edge {edge} not present")
        return PreferenceGraph(self.g, (self.edges - {edge}) | {(v, u)})


@dataclass(frozen=True)
class SccDecomposition:
    """Partition of vertices into strongly connected components."""

    components: tuple[frozenset[int], ...]
    has_conflict: bool


def build_graph(matrix: ComparisonMatrix) -> PreferenceGraph:
    """Turn the +1 cells of a judgment matrix into directed edges; ties add none."""
    rows, cols = np.nonzero(matrix.entries > 0)
    edges = frozenset((int(u), int(v)) for u, v in zip(rows, cols))
    return PreferenceGraph(matrix.g, edges)


def scc(graph: PreferenceGraph) -> SccDecomposition:
    """Strongly connected components of the preference graph.

    Components are presented sorted by their smallest vertex; a component of
    size > 1 certifies a preference cycle.
    """
    if graph.g == 0:
        return SccDecomposition(components=(), has_conflict=False)
    labels = tarjan_scc_labels(graph.adjacency())
    groups: dict[int, set[int]] = {}
    for vertex, label in enumerate(labels):
        groups.setdefault(int(label), set()).add(vertex)
    components = tuple(
        frozenset(members) for members in sorted(groups.values(), key=min)
    )
    return SccDecomposition(
        components=components,
        has_conflict=any(len(c) > 1 for c in components),
    )


def has_conflicts(matrix: ComparisonMatrix) -> bool:
    """True iff the judgments contain a preference cycle."""
    return scc(build_graph(matrix)).has_conflict


def is_acyclic(graph: PreferenceGraph) -> bool:
    return not scc(graph).has_conflict


def find_cycle(graph: PreferenceGraph) -> Optional[list[Edge]]:
    """Return one directed cycle as an ordered edge list, or None if acyclic.

    Deterministic by construction: depth-first search rooted at the lowest
    unvisited vertex, neighbors in ascending index order; the first back-edge
    encountered closes the reported cycle.
    """
    g = graph.g
    adj = [sorted(v for u, v in graph.edges if u == w) for w in range(g)]
    color = [0] * g  # 0 unvisited, 1 on stack, 2 done
    path: list[int] = []

    def dfs(start: int) -> Optional[list[Edge]]:
        stack: list[tuple[int, int]] = [(start, 0)]
        color[start] = 1
        path.append(start)
        while stack:
            v, ptr = stack[-1]
            advanced = False
            for k in range(ptr, len(adj[v])):
                w = adj[v][k]
                if color[w] == 1:
                    at = path.index(w)
                    nodes = path[at:] + [w]
                    return list(zip(nodes, nodes[1:]))
                if color[w] == 0:
                    stack[-1] = (v, k + 1)
                    stack.append((w, 0))
                    color[w] = 1
                    path.append(w)
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                path.pop()
                color[v] = 2
        return None

    for root in range(g):
        if color[root] == 0:
            cycle = dfs(root)
            if cycle is not None:
                return cycle
    return None
