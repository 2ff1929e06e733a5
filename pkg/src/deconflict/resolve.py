"""Conflict resolution: turn a cyclic preference graph into a DAG.

The principled route removes a minimum feedback arc set — exact subset-DP for
small groups, the greedy sink/source peel heuristic beyond. Two ablation
variants ship alongside: random cycle-edge removal and cycle-edge reversal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from ._kernels import eades_order, min_fas_cost_keeping_edge, min_fas_order
from .errors import SizeLimitError, ValidationError
from .graphs import Edge, PreferenceGraph, find_cycle, is_acyclic

EXACT_LIMIT_DEFAULT = 10
EXACT_LIMIT_CEILING = 12

METHOD_EXACT = "exact"
METHOD_EADES = "eades"
METHOD_RANDOM = "random"
METHOD_REVERSE = "reverse"


@dataclass(frozen=True)
class FasSolution:
    """A conflict-free DAG plus the edits that produced it.

    removed_edges and the DAG's edges partition the original edge set for the
    removal-based methods; the reverse method instead logs each flip (in its
    original orientation) in reversed_edges and only removes edges when its
    termination cap forces a fallback. optimal is True when the removed set is
    provably minimum: always for the exact method, and for any method when the
    input was already acyclic. multiple_optima reports whether other minimum
    arc sets exist (exact method only; None elsewhere).
    """

    dag: PreferenceGraph
    removed_edges: frozenset[Edge]
    reversed_edges: tuple[Edge, ...]
    method: str
    optimal: bool
    multiple_optima: Optional[bool] = None

    @property
    def edits_made(self) -> bool:
        return bool(self.removed_edges) or bool(self.reversed_edges)


def _check_limit(exact_limit: int) -> int:
    if not 1 <= exact_limit <= EXACT_LIMIT_CEILING:
        raise ValidationError(
            f"exact_limit must be in [1, {EXACT_LIMIT_CEILING}], got {exact_limit}"
        )
    return exact_limit


def _back_edges(graph: PreferenceGraph, order) -> frozenset[Edge]:
    pos = {int(v): p for p, v in enumerate(order)}
    return frozenset((u, v) for u, v in graph.edges if pos[v] < pos[u])


def _identity(graph: PreferenceGraph, method: str) -> FasSolution:
    return FasSolution(
        dag=graph,
        removed_edges=frozenset(),
        reversed_edges=(),
        method=method,
        optimal=True,
        multiple_optima=False if method == METHOD_EXACT else None,
    )


def min_fas_exact(
    graph: PreferenceGraph, exact_limit: int = EXACT_LIMIT_DEFAULT
) -> FasSolution:
    """Remove a minimum feedback arc set, found by exhaustive subset DP.

    Deterministic: the DP prefers the lowest vertex index at every step, and
    the removed set is exactly the backward edges of the reconstructed
    ordering. multiple_optima flags inputs where other minimum sets exist.
    """
    limit = _check_limit(exact_limit)
    if graph.g > limit:
        raise SizeLimitError(
            f"exact solver is capped at g={limit} (ceiling {EXACT_LIMIT_CEILING}); "
            f"got g={graph.g} — use min_fas_eades instead"
        )
    adj = graph.adjacency()
    order, cost = min_fas_order(adj)
    removed = _back_edges(graph, order)
    multiple = any(
        int(min_fas_cost_keeping_edge(adj, u, v)) == int(cost)
        for u, v in sorted(removed)
    )
    return FasSolution(
        dag=graph.without_edges(removed),
        removed_edges=removed,
        reversed_edges=(),
        method=METHOD_EXACT,
        optimal=True,
        multiple_optima=multiple,
    )


def min_fas_eades(graph: PreferenceGraph) -> FasSolution:
    """Remove the backward edges of the greedy sink/source peel ordering."""
    order = eades_order(graph.adjacency())
    removed = _back_edges(graph, order)
    return FasSolution(
        dag=graph.without_edges(removed),
        removed_edges=removed,
        reversed_edges=(),
        method=METHOD_EADES,
        optimal=False,
        multiple_optima=None,
    )


def resolve(
    graph: PreferenceGraph, exact_limit: int = EXACT_LIMIT_DEFAULT
) -> FasSolution:
    """Exact resolution up to exact_limit vertices, heuristic beyond.

    Already-acyclic inputs short-circuit to the identity solution.
    """
    limit = _check_limit(exact_limit)
    if is_acyclic(graph):
        return _identity(graph, METHOD_EXACT if graph.g <= limit else METHOD_EADES)
    if graph.g <= limit:
        return min_fas_exact(graph, limit)
    return min_fas_eades(graph)


def resolve_random(graph: PreferenceGraph, seed: int) -> FasSolution:
    """Break cycles by removing one uniformly chosen edge per detected cycle."""
    rng = random.Random(seed)
    current = graph
    removed: set[Edge] = set()
    while True:
        cycle = find_cycle(current)
        if cycle is None:
            break
        edge = cycle[rng.randrange(len(cycle))]
        removed.add(edge)
        current = current.without_edges([edge])
    return FasSolution(
        dag=current,
        removed_edges=frozenset(removed),
        reversed_edges=(),
        method=METHOD_RANDOM,
        optimal=not removed,
        multiple_optima=None,
    )


def resolve_reverse(graph: PreferenceGraph, seed: int) -> FasSolution:
    """Break cycles by reversing one uniformly chosen edge per detected cycle.

    Reversal can create new cycles, so termination is not guaranteed by the
    loop itself; after |E|^2 reversals the variant falls back to removing the
    chosen edge instead. Flips are logged in their pre-flip orientation.
    """
    rng = random.Random(seed)
    current = graph
    flips: list[Edge] = []
    removed: set[Edge] = set()
    cap = len(graph.edges) ** 2
    while True:
        cycle = find_cycle(current)
        if cycle is None:
            break
        edge = cycle[rng.randrange(len(cycle))]
        if len(flips) < cap:
            flips.append(edge)
            current = current.with_edge_reversed(edge)
        else:
            removed.add(edge)
            current = current.without_edges([edge])
    return FasSolution(
        dag=current,
        removed_edges=frozenset(removed),
        reversed_edges=tuple(flips),
        method=METHOD_REVERSE,
        optimal=not (flips or removed),
        multiple_optima=None,
    )
