"""Verdict extraction from raw judge output.

Parsers never raise on malformed text: anything unreadable degrades to the
neutral verdict for its kind (tie / middle score / identity ranking) with
fallback_used set, so one bad generation can't sink a whole group.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..errors import ValidationError

KIND_PAIRWISE = "pairwise"
KIND_POINTWISE = "pointwise"
KIND_LISTWISE = "listwise"

_BEST_ANSWER = re.compile(r"<best_answer>(.*?)</best_answer>", re.IGNORECASE | re.DOTALL)
_SCORE = re.compile(r"<score>\s*(-?\d+)\s*</score>", re.IGNORECASE)
_RANKING = re.compile(r"<ranking>(.*?)</ranking>", re.IGNORECASE | re.DOTALL)

MIDDLE_SCORE = 5


@dataclass(frozen=True)
class ParsedVerdict:
    """One parsed judgment; exactly the field matching kind is populated."""

    kind: str
    pairwise_winner: Optional[str] = None  # "A", "B", or "tie"
    pointwise_score: Optional[int] = None
    listwise_ranking: Optional[tuple[int, ...]] = None  # position of each response
    fallback_used: bool = False
    raw_text: str = ""

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "pairwise_winner": self.pairwise_winner,
            "pointwise_score": self.pointwise_score,
            "listwise_ranking": (
                list(self.listwise_ranking) if self.listwise_ranking is not None else None
            ),
            "fallback_used": self.fallback_used,
        }


def parse_pairwise(raw: str) -> ParsedVerdict:
    """First <best_answer> span, trimmed, case-insensitive; unreadable -> tie."""
    match = _BEST_ANSWER.search(raw)
    if match:
        token = match.group(1).strip().lower()
        if token == "a":
            return ParsedVerdict(KIND_PAIRWISE, pairwise_winner="A", raw_text=raw)
        if token == "b":
            return ParsedVerdict(KIND_PAIRWISE, pairwise_winner="B", raw_text=raw)
        if token == "tie":
            return ParsedVerdict(KIND_PAIRWISE, pairwise_winner="tie", raw_text=raw)
    return ParsedVerdict(
        KIND_PAIRWISE, pairwise_winner="tie", fallback_used=True, raw_text=raw
    )


def parse_pointwise(raw: str) -> ParsedVerdict:
    """Integer from <score>X</score>, clamped to [1, 10]; unreadable -> 5."""
    match = _SCORE.search(raw)
    if not match:
        return ParsedVerdict(
            KIND_POINTWISE, pointwise_score=MIDDLE_SCORE, fallback_used=True, raw_text=raw
        )
    value = int(match.group(1))
    clamped = min(10, max(1, value))
    return ParsedVerdict(
        KIND_POINTWISE,
        pointwise_score=clamped,
        fallback_used=clamped != value,
        raw_text=raw,
    )


def parse_listwise(raw: str, g: int) -> ParsedVerdict:
    """Comma-separated letters in <ranking> tags -> rank position per response.

    The returned tuple maps response index to its position (0 = best). Any
    defect (duplicates, unknown letters, wrong count) falls back to the
    identity ranking.
    """
    if g < 2:
        raise ValidationError(f"listwise parsing needs g >= 2, got {g}")
    identity = tuple(range(g))
    match = _RANKING.search(raw)
    if not match:
        return ParsedVerdict(
            KIND_LISTWISE, listwise_ranking=identity, fallback_used=True, raw_text=raw
        )
    tokens = [t.strip().upper() for t in match.group(1).split(",")]
    indices = []
    for token in tokens:
        if len(token) != 1 or not "A" <= token <= "Z":
            indices = None
            break
        indices.append(ord(token) - ord("A"))
    if indices is None or sorted(indices) != list(range(g)):
        return ParsedVerdict(
            KIND_LISTWISE, listwise_ranking=identity, fallback_used=True, raw_text=raw
        )
    positions = [0] * g
    for rank, response_idx in enumerate(indices):
        positions[response_idx] = rank
    return ParsedVerdict(
        KIND_LISTWISE, listwise_ranking=tuple(positions), raw_text=raw
    )
