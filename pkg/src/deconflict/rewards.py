"""Reward strategies over judgment data, and group-relative advantages.

The flagship strategy scores each response by out-degree minus in-degree in
the deconflicted DAG; the baselines (win rate, iterative ratings, listwise
rank mapping, pointwise passthrough) share the same advantage normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from ._kernels import elo_sweep
from .errors import DeconflictError, StrategyError, ValidationError
from .graphs import ComparisonMatrix, Edge, build_graph, scc
from .resolve import (
    EXACT_LIMIT_DEFAULT,
    FasSolution,
    resolve,
    resolve_random,
    resolve_reverse,
)

STRATEGY_DGR = "dgr"
STRATEGY_DGR_RANDOM = "dgr-random"
STRATEGY_DGR_REVERSE = "dgr-reverse"
STRATEGY_PREF = "pref"
STRATEGY_ELO = "elo"
STRATEGY_LISTWISE = "listwise"
STRATEGY_POINTWISE = "pointwise"

STRATEGIES = (
    STRATEGY_DGR,
    STRATEGY_DGR_RANDOM,
    STRATEGY_DGR_REVERSE,
    STRATEGY_PREF,
    STRATEGY_ELO,
    STRATEGY_LISTWISE,
    STRATEGY_POINTWISE,
)

MATRIX_STRATEGIES = (
    STRATEGY_DGR,
    STRATEGY_DGR_RANDOM,
    STRATEGY_DGR_REVERSE,
    STRATEGY_PREF,
    STRATEGY_ELO,
)

ELO_K = 32.0
ELO_CONVERGENCE_THRESHOLD = 0.01
ELO_MAX_SWEEPS = 100

DEGENERATE_STD = 1e-8


@dataclass(frozen=True)
class RewardDiagnostics:
    """What happened on the way to the scores; serialized into responses."""

    conflict_found: bool = False
    removed_edges: tuple[Edge, ...] = ()
    reversed_edges: tuple[Edge, ...] = ()
    fas_method: Optional[str] = None
    fallback_verdicts: int = 0
    scc_sizes: tuple[int, ...] = ()
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class RewardVector:
    scores: tuple[float, ...]
    strategy: str
    diagnostics: RewardDiagnostics = field(default_factory=RewardDiagnostics)

    @property
    def g(self) -> int:
        return len(self.scores)


@dataclass(frozen=True)
class AdvantageVector:
    """Group-normalized scores; all zeros when the group had no variance."""

    values: tuple[float, ...]
    degenerate: bool


def net_win_scores(solution: FasSolution) -> RewardVector:
    """Out-degree minus in-degree of each response in the deconflicted DAG."""
    dag = solution.dag
    if scc(dag).has_conflict:
        raise DeconflictError("net-win scoring requires an acyclic graph; got cycles")
    out_deg = [0] * dag.g
    in_deg = [0] * dag.g
    for u, v in dag.edges:
        out_deg[u] += 1
        in_deg[v] += 1
    scores = tuple(out_deg[i] - in_deg[i] for i in range(dag.g))
    strategy = {
        "random": STRATEGY_DGR_RANDOM,
        "reverse": STRATEGY_DGR_REVERSE,
    }.get(solution.method, STRATEGY_DGR)
    return RewardVector(
        scores=scores,
        strategy=strategy,
        diagnostics=RewardDiagnostics(
            conflict_found=solution.edits_made,
            removed_edges=tuple(sorted(solution.removed_edges)),
            reversed_edges=solution.reversed_edges,
            fas_method=solution.method,
        ),
    )


def group_advantages(rewards: RewardVector) -> AdvantageVector:
    """Normalize scores to zero mean and unit population standard deviation."""
    arr = np.asarray(rewards.scores, dtype=np.float64)
    if arr.size == 0:
        raise ValidationError("cannot normalize an empty group")
    std = float(arr.std())
    if std < DEGENERATE_STD:
        return AdvantageVector(values=(0.0,) * arr.size, degenerate=True)
    values = (arr - arr.mean()) / std
    return AdvantageVector(values=tuple(float(v) for v in values), degenerate=False)


def pref_win_rate(matrix: ComparisonMatrix) -> RewardVector:
    """Win rate of each response against its peers, ties counting half."""
    g = matrix.g
    if g == 1:
        return RewardVector(
            scores=(1.0,),
            strategy=STRATEGY_PREF,
            diagnostics=RewardDiagnostics(notes=("single-response group",)),
        )
    entries = matrix.entries
    wins = (entries > 0).sum(axis=1)
    ties = (entries == 0).sum(axis=1) - 1  # discount the diagonal
    scores = (wins + 0.5 * ties) / (g - 1)
    return RewardVector(
        scores=tuple(float(s) for s in scores),
        strategy=STRATEGY_PREF,
    )


def elo_ratings(
    matrix: ComparisonMatrix,
    k: float = ELO_K,
    tol: float = ELO_CONVERGENCE_THRESHOLD,
    max_sweeps: int = ELO_MAX_SWEEPS,
):
    """Raw rating iteration. Returns (ratings, sweeps, converged, sum_history)."""
    ratings, sweeps, converged, history = elo_sweep(
        matrix.entries, float(k), float(tol), int(max_sweeps)
    )
    return np.asarray(ratings), int(sweeps), bool(converged), np.asarray(history)


def elo_rewards(matrix: ComparisonMatrix) -> RewardVector:
    """Iterated pairwise ratings, min-max normalized to [-1, 1].

    Every pair contributes each sweep (ties count 0.5), visited in ascending
    (i, j) order. Groups whose ratings never separate map to all zeros.
    Non-convergence within the sweep budget is a note, not an error: the
    min-max endpoints are stable long before the raw ratings settle.
    """
    if matrix.g < 2:
        return RewardVector(
            scores=(0.0,) * matrix.g,
            strategy=STRATEGY_ELO,
            diagnostics=RewardDiagnostics(notes=("single-response group",)),
        )
    ratings, sweeps, converged, _ = elo_ratings(matrix)
    lo = float(ratings.min())
    hi = float(ratings.max())
    if hi - lo < 1e-9:
        scores = (0.0,) * matrix.g
    else:
        scores = tuple(float(2.0 * (r - lo) / (hi - lo) - 1.0) for r in ratings)
    notes = () if converged else (f"ratings not converged after {sweeps} sweeps",)
    return RewardVector(
        scores=scores,
        strategy=STRATEGY_ELO,
        diagnostics=RewardDiagnostics(notes=notes),
    )


def listwise_rewards(positions: Sequence[int]) -> RewardVector:
    """Map rank positions (0 = best) linearly onto [1, -1]."""
    g = len(positions)
    if g == 0:
        raise ValidationError("listwise ranking must not be empty")
    if sorted(positions) != list(range(g)):
        raise ValidationError(
            f"listwise ranking must be a permutation of 0..{g - 1}, got {list(positions)}"
        )
    if g == 1:
        return RewardVector(scores=(0.0,), strategy=STRATEGY_LISTWISE)
    scores = tuple(1.0 - (2.0 * int(p)) / (g - 1) for p in positions)
    return RewardVector(scores=scores, strategy=STRATEGY_LISTWISE)


def pointwise_rewards(raw_scores: Sequence[Optional[int]]) -> RewardVector:
    """Pass absolute 1-10 scores through; parse failures become the middle score 5."""
    if len(raw_scores) == 0:
        raise ValidationError("pointwise scores must not be empty")
    fallbacks = sum(1 for s in raw_scores if s is None)
    scores = tuple(float(5 if s is None else s) for s in raw_scores)
    return RewardVector(
        scores=scores,
        strategy=STRATEGY_POINTWISE,
        diagnostics=RewardDiagnostics(fallback_verdicts=fallbacks),
    )


StrategyInput = Union[ComparisonMatrix, Sequence[int], Sequence[Optional[int]]]


def compute_strategy(
    inputs: StrategyInput,
    strategy: str,
    seed: Optional[int] = None,
    exact_limit: int = EXACT_LIMIT_DEFAULT,
) -> tuple[RewardVector, AdvantageVector]:
    """Single dispatch point shared by the CLI, the service, and the shim.

    Matrix strategies take a ComparisonMatrix; listwise takes rank positions;
    pointwise takes parsed scores with None marking parse failures. The seed
    feeds the random/reverse ablations only (default 0).
    """
    if strategy not in STRATEGIES:
        raise StrategyError(
            f"unknown strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}"
        )

    if strategy in MATRIX_STRATEGIES:
        if not isinstance(inputs, ComparisonMatrix):
            raise StrategyError(f"strategy {strategy!r} requires a judgment matrix")
        if strategy == STRATEGY_PREF:
            rewards = pref_win_rate(inputs)
        elif strategy == STRATEGY_ELO:
            rewards = elo_rewards(inputs)
        else:
            graph = build_graph(inputs)
            decomposition = scc(graph)
            if strategy == STRATEGY_DGR:
                solution = resolve(graph, exact_limit)
            elif strategy == STRATEGY_DGR_RANDOM:
                solution = resolve_random(graph, seed or 0)
            else:
                solution = resolve_reverse(graph, seed or 0)
            rewards = net_win_scores(solution)
            rewards = replace(
                rewards,
                diagnostics=replace(
                    rewards.diagnostics,
                    conflict_found=decomposition.has_conflict,
                    scc_sizes=tuple(len(c) for c in decomposition.components),
                ),
            )
    elif strategy == STRATEGY_LISTWISE:
        if isinstance(inputs, ComparisonMatrix):
            raise StrategyError("strategy 'listwise' requires rank positions, not a matrix")
        rewards = listwise_rewards(inputs)
    else:
        if isinstance(inputs, ComparisonMatrix):
            raise StrategyError("strategy 'pointwise' requires raw scores, not a matrix")
        rewards = pointwise_rewards(inputs)

    return rewards, group_advantages(rewards)
