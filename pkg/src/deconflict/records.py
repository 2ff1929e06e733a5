"""Wire formats: JSONL records, reward responses, canonical JSON encoding.

Every JSON document the CLI writes and the service returns goes through
dumps_canonical, so the two surfaces are byte-comparable. Matrices travel as
{"id", "g", "entries"}; dataset rows as SampleRecord objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .errors import ValidationError
from .graphs import ComparisonMatrix
from .rewards import AdvantageVector, RewardVector


def dumps_canonical(obj) -> str:
    """Compact, key-order-preserving JSON; the one encoder for all outputs."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


@dataclass(frozen=True)
class SampleRecord:
    """One dataset row: a query, its candidate responses, optional labels."""

    id: str
    query: str
    responses: tuple[str, ...]
    chosen_idx: Optional[int] = None
    rejected_idx: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        indices = []
        if self.chosen_idx is not None:
            indices.append(self.chosen_idx)
        if self.rejected_idx is not None:
            indices.extend(self.rejected_idx)
        if len(set(indices)) != len(indices):
            raise ValidationError(f"record {self.id}: chosen/rejected indices overlap")
        for idx in indices:
            if not 0 <= idx < len(self.responses):
                raise ValidationError(
                    f"record {self.id}: index {idx} out of range for "
                    f"{len(self.responses)} responses"
                )

    @property
    def labeled(self) -> bool:
        return self.chosen_idx is not None and bool(self.rejected_idx)

    @classmethod
    def from_json_dict(cls, data: dict) -> "SampleRecord":
        try:
            return cls(
                id=str(data["id"]),
                query=str(data["query"]),
                responses=tuple(str(r) for r in data["responses"]),
                chosen_idx=data.get("chosen_idx"),
                rejected_idx=(
                    tuple(data["rejected_idx"]) if data.get("rejected_idx") else None
                ),
            )
        except KeyError as exc:
            raise ValidationError(f"sample record missing field {exc}") from exc


def matrix_to_record(record_id: str, matrix: ComparisonMatrix) -> dict:
    return {"id": record_id, "g": matrix.g, "entries": matrix.to_lists()}


def matrix_from_record(data: dict) -> tuple[str, ComparisonMatrix]:
    try:
        record_id = str(data["id"])
        entries = data["entries"]
    except KeyError as exc:
        raise ValidationError(f"matrix record missing field {exc}") from exc
    matrix = ComparisonMatrix(entries)
    declared_g = data.get("g")
    if declared_g is not None and int(declared_g) != matrix.g:
        raise ValidationError(
            f"record {record_id}: declared g={declared_g} but matrix is {matrix.g}x{matrix.g}"
        )
    return record_id, matrix


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: invalid JSON: {exc}") from exc


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(dumps_canonical(row))
            fh.write("\n")
            count += 1
    return count


def reward_response_dict(
    record_id: str,
    rewards: RewardVector,
    advantages: AdvantageVector,
    fallback_verdicts: Optional[int] = None,
) -> dict:
    """The reward-response document shared by cli_score and POST /v1/rewards."""
    diag = rewards.diagnostics
    return {
        "id": record_id,
        "scores": list(rewards.scores),
        "advantages": list(advantages.values),
        "diagnostics": {
            "conflict_found": diag.conflict_found,
            "removed_edges": [list(e) for e in diag.removed_edges],
            "reversed_edges": [list(e) for e in diag.reversed_edges],
            "fas_method": diag.fas_method,
            "fallback_verdicts": (
                diag.fallback_verdicts if fallback_verdicts is None else fallback_verdicts
            ),
            "scc_sizes": list(diag.scc_sizes),
            "degenerate": advantages.degenerate,
            "notes": list(diag.notes),
        },
    }
