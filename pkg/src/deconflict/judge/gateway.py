"""Judgment collection: all-pairs matrices, rankings, and absolute scores.

One gateway owns a judge client, an in-flight bound, and (optionally) the
on-disk cache, so every consumer — library calls, CLI commands, concurrent
service requests — shares the same global concurrency budget. Failures never
abort a group: exhausted retries and unparseable output degrade to neutral
verdicts and are tallied in the collection report.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import TransportError, ValidationError
from ..graphs import ComparisonMatrix
from .cache import JudgmentCache, cache_key
from .parsing import parse_listwise, parse_pairwise, parse_pointwise
from .prompts import (
    LISTWISE_PROMPT_ID,
    PAIRWISE_PROMPT_IDS,
    POINTWISE_PROMPT_ID,
    PROMPT_IDS,
    render_prompt,
)
from .transport import JudgeClient, OpenAiChatJudge


@dataclass(frozen=True)
class JudgeConfig:
    api_base: str = ""
    api_key: str = ""
    model: str = ""
    prompt_id: str = "P1"
    temperature: float = 0.0
    max_in_flight: int = 8
    retry_limit: int = 3
    retry_backoff_ms: int = 250
    timeout_ms: int = 30_000
    swap_check: bool = False

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ValidationError("max_in_flight must be >= 1")
        if self.timeout_ms <= 0:
            raise ValidationError("timeout_ms must be > 0")
        if self.retry_limit < 0:
            raise ValidationError("retry_limit must be >= 0")
        if self.retry_backoff_ms < 0:
            raise ValidationError("retry_backoff_ms must be >= 0")
        if self.prompt_id not in PROMPT_IDS:
            raise ValidationError(
                f"unknown prompt id {self.prompt_id!r}; expected one of {', '.join(PROMPT_IDS)}"
            )


@dataclass
class CollectionReport:
    """Tally of what collection actually did, fallback accounting included.

    fallback_verdicts counts judged orientations that ended in a degraded
    verdict: transport_failures (retries exhausted) plus parse_fallbacks
    (response text unreadable). Swap-check disagreements resolve to tie but
    are not fallbacks; they get their own counter.
    """

    requests_issued: int = 0
    cache_hits: int = 0
    transport_failures: int = 0
    parse_fallbacks: int = 0
    swap_disagreements: int = 0

    @property
    def fallback_verdicts(self) -> int:
        return self.transport_failures + self.parse_fallbacks

    def merge(self, other: "CollectionReport") -> None:
        self.requests_issued += other.requests_issued
        self.cache_hits += other.cache_hits
        self.transport_failures += other.transport_failures
        self.parse_fallbacks += other.parse_fallbacks
        self.swap_disagreements += other.swap_disagreements


@dataclass(frozen=True)
class CollectionResult:
    matrix: ComparisonMatrix
    report: CollectionReport


@dataclass(frozen=True)
class ListwiseResult:
    positions: tuple[int, ...]
    report: CollectionReport


@dataclass(frozen=True)
class PointwiseResult:
    scores: tuple[Optional[int], ...]  # None marks a degraded verdict
    report: CollectionReport


class JudgeGateway:
    def __init__(
        self,
        judge: JudgeClient,
        config: JudgeConfig,
        cache: Optional[JudgmentCache] = None,
        gate: Optional[threading.BoundedSemaphore] = None,
    ):
        self.judge = judge
        self.config = config
        self.cache = cache
        # The gate is the global in-flight bound; pass one in to share it
        # across gateways (e.g. per-request override gateways in the service).
        self._gate = gate or threading.BoundedSemaphore(config.max_in_flight)

    # -- single judged prompt ------------------------------------------------

    def _fetch(self, prompt_id: str, prompt: str, report: CollectionReport) -> str:
        """Raw judge text for one prompt: cache, then transport with retries."""
        key = cache_key(self.config.model, prompt_id, prompt)
        if self.cache is not None:
            record = self.cache.get(key)
            if record is not None:
                report.cache_hits += 1
                return record.raw_response

        last_error: Optional[Exception] = None
        for attempt in range(self.config.retry_limit + 1):
            if attempt > 0 and self.config.retry_backoff_ms:
                time.sleep(self.config.retry_backoff_ms * 2 ** (attempt - 1) / 1000.0)
            try:
                with self._gate:
                    report.requests_issued += 1
                    raw = self.judge.complete(prompt)
                break
            except Exception as exc:  # transport owns its failure taxonomy
                last_error = exc
        else:
            raise TransportError(
                f"judge failed after {self.config.retry_limit + 1} attempts: {last_error}"
            ) from last_error

        if self.cache is not None:
            self.cache.store_response(key, self.config.model, prompt_id, prompt, raw)
        return raw

    def _judge_orientation(
        self, query: str, first: str, second: str, report: CollectionReport
    ) -> int:
        """Verdict for one slot assignment: +1 first wins, -1 second, 0 tie."""
        prompt = render_prompt(self.config.prompt_id, query, [first, second])
        try:
            raw = self._fetch(self.config.prompt_id, prompt, report)
        except TransportError:
            report.transport_failures += 1
            return 0
        verdict = parse_pairwise(raw)
        if verdict.fallback_used:
            report.parse_fallbacks += 1
        return {"A": 1, "B": -1, "tie": 0}[verdict.pairwise_winner]

    def _judge_pair(self, query: str, responses: list[str], i: int, j: int):
        """Canonical-orientation verdict for the unordered pair {i, j}, i < j."""
        report = CollectionReport()
        value = self._judge_orientation(query, responses[i], responses[j], report)
        if self.config.swap_check:
            swapped = self._judge_orientation(query, responses[j], responses[i], report)
            if -swapped != value:
                value = 0
                report.swap_disagreements += 1
        return value, report

    # -- group-level collection ----------------------------------------------

    def collect_matrix(self, query: str, responses: list[str]) -> CollectionResult:
        """Judge all unordered pairs into an antisymmetric verdict matrix.

        Pair (i, j) with i < j puts response i in the first slot. Requests run
        concurrently under the gateway-wide in-flight bound; the assembled
        matrix is independent of completion order.
        """
        g = len(responses)
        if g < 2:
            raise ValidationError(f"need at least 2 responses to compare, got {g}")
        if self.config.prompt_id not in PAIRWISE_PROMPT_IDS:
            raise ValidationError(
                f"matrix collection needs a pairwise prompt, got {self.config.prompt_id!r}"
            )
        pairs = [(i, j) for i in range(g) for j in range(i + 1, g)]
        report = CollectionReport()
        entries = np.zeros((g, g), dtype=np.int8)
        workers = min(len(pairs), self.config.max_in_flight)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(
                pool.map(lambda p: self._judge_pair(query, responses, *p), pairs)
            )
        for (i, j), (value, pair_report) in zip(pairs, outcomes):
            entries[i, j] = value
            entries[j, i] = -value
            report.merge(pair_report)
        return CollectionResult(matrix=ComparisonMatrix(entries), report=report)

    def collect_listwise(self, query: str, responses: list[str]) -> ListwiseResult:
        """One ranking request for the whole group."""
        g = len(responses)
        report = CollectionReport()
        prompt = render_prompt(LISTWISE_PROMPT_ID, query, responses)
        try:
            raw = self._fetch(LISTWISE_PROMPT_ID, prompt, report)
        except TransportError:
            report.transport_failures += 1
            return ListwiseResult(positions=tuple(range(g)), report=report)
        verdict = parse_listwise(raw, g)
        if verdict.fallback_used:
            report.parse_fallbacks += 1
        return ListwiseResult(positions=verdict.listwise_ranking, report=report)

    def collect_pointwise(self, query: str, responses: list[str]) -> PointwiseResult:
        """One absolute 1-10 score per response, collected concurrently."""
        report = CollectionReport()

        def score_one(text: str):
            local = CollectionReport()
            prompt = render_prompt(POINTWISE_PROMPT_ID, query, [text])
            try:
                raw = self._fetch(POINTWISE_PROMPT_ID, prompt, local)
            except TransportError:
                local.transport_failures += 1
                return None, local
            verdict = parse_pointwise(raw)
            if verdict.fallback_used:
                local.parse_fallbacks += 1
                if "<score>" not in raw.lower():
                    return None, local  # missing tag: let scoring re-default
            return verdict.pointwise_score, local

        workers = min(len(responses), self.config.max_in_flight)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(score_one, responses))
        scores = []
        for score, local in outcomes:
            scores.append(score)
            report.merge(local)
        return PointwiseResult(scores=tuple(scores), report=report)


def build_http_judge(config: JudgeConfig) -> OpenAiChatJudge:
    return OpenAiChatJudge(
        api_base=config.api_base,
        api_key=config.api_key,
        model=config.model,
        temperature=config.temperature,
        timeout_ms=config.timeout_ms,
    )


def collect_matrix(
    query: str,
    responses: list[str],
    config: JudgeConfig,
    judge: Optional[JudgeClient] = None,
    cache: Optional[JudgmentCache] = None,
) -> CollectionResult:
    """One-shot collection without keeping a gateway around."""
    gateway = JudgeGateway(judge or build_http_judge(config), config, cache)
    return gateway.collect_matrix(query, responses)
