"""End-to-end reward computation: judge collection through advantages.

One request in, one response document out: collect verdicts for the chosen
strategy, resolve conflicts where the strategy calls for it, score, and
normalize. Judge degradation surfaces in the diagnostics, never as a failure
of the whole group.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import StrategyError, ValidationError
from .judge.gateway import JudgeGateway
from .records import reward_response_dict
from .rewards import (
    MATRIX_STRATEGIES,
    STRATEGIES,
    STRATEGY_LISTWISE,
    STRATEGY_POINTWISE,
    compute_strategy,
)


@dataclass(frozen=True)
class RewardRequest:
    id: str
    query: str
    responses: tuple[str, ...]
    strategy: str
    seed: Optional[int] = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise StrategyError(
                f"unknown strategy {self.strategy!r}; expected one of {', '.join(STRATEGIES)}"
            )
        if len(self.responses) == 0:
            raise ValidationError(f"request {self.id}: responses must not be empty")
        if self.strategy != STRATEGY_POINTWISE and len(self.responses) < 2:
            raise ValidationError(
                f"request {self.id}: strategy {self.strategy!r} needs at least 2 responses"
            )


def compute_rewards_end_to_end(request: RewardRequest, gateway: JudgeGateway) -> dict:
    """Run the full pipeline for one group and return the response document."""
    responses = list(request.responses)
    if request.strategy in MATRIX_STRATEGIES:
        collected = gateway.collect_matrix(request.query, responses)
        rewards, advantages = compute_strategy(
            collected.matrix, request.strategy, request.seed
        )
        fallbacks = collected.report.fallback_verdicts
    elif request.strategy == STRATEGY_LISTWISE:
        listed = gateway.collect_listwise(request.query, responses)
        rewards, advantages = compute_strategy(list(listed.positions), STRATEGY_LISTWISE)
        fallbacks = listed.report.fallback_verdicts
    else:
        pointed = gateway.collect_pointwise(request.query, responses)
        rewards, advantages = compute_strategy(list(pointed.scores), STRATEGY_POINTWISE)
        fallbacks = pointed.report.fallback_verdicts
    return reward_response_dict(request.id, rewards, advantages, fallback_verdicts=fallbacks)
