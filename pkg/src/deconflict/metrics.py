"""Dataset-level diagnostics: conflict rate, pairwise accuracy, correlation.

The conflict rate is the percentage of samples whose judgment matrix contains
a preference cycle. Accuracy counts how often the judge named the labeled
chosen response the winner against each rejected one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .graphs import ComparisonMatrix, build_graph, scc


@dataclass(frozen=True)
class CdrSampleResult:
    id: str
    g: int
    has_conflict: bool
    conflict_members: tuple[tuple[int, ...], ...]  # SCCs of size > 1


@dataclass(frozen=True)
class CdrReport:
    total_samples: int
    conflicted_samples: int
    skipped_samples: int
    cdr_percent: float
    per_sample: tuple[CdrSampleResult, ...]

    def to_json_dict(self) -> dict:
        return {
            "total_samples": self.total_samples,
            "conflicted_samples": self.conflicted_samples,
            "skipped_samples": self.skipped_samples,
            "cdr_percent": self.cdr_percent,
            "per_sample": [
                {
                    "id": s.id,
                    "g": s.g,
                    "has_conflict": s.has_conflict,
                    "conflict_members": [list(c) for c in s.conflict_members],
                }
                for s in self.per_sample
            ],
        }


def compute_cdr(samples: Iterable[tuple[str, ComparisonMatrix]]) -> CdrReport:
    """Conflict rate over a stream of (sample id, judgment matrix) pairs.

    Samples with fewer than two responses cannot conflict and are excluded
    from the denominator; they surface in skipped_samples instead.
    """
    per_sample: list[CdrSampleResult] = []
    skipped = 0
    conflicted = 0
    for sample_id, matrix in samples:
        if matrix.g < 2:
            skipped += 1
            continue
        decomposition = scc(build_graph(matrix))
        members = tuple(
            tuple(sorted(c)) for c in decomposition.components if len(c) > 1
        )
        if decomposition.has_conflict:
            conflicted += 1
        per_sample.append(
            CdrSampleResult(
                id=str(sample_id),
                g=matrix.g,
                has_conflict=decomposition.has_conflict,
                conflict_members=members,
            )
        )
    total = len(per_sample)
    if total == 0:
        raise ValidationError("conflict rate is undefined over zero eligible samples")
    return CdrReport(
        total_samples=total,
        conflicted_samples=conflicted,
        skipped_samples=skipped,
        cdr_percent=100.0 * conflicted / total,
        per_sample=tuple(per_sample),
    )


@dataclass(frozen=True)
class AccuracySample:
    """One labeled sample: the chosen index, its rejects, and the verdicts.

    verdicts maps (chosen_idx, rejected_idx) to {-1, 0, +1} with +1 meaning
    the chosen response won that comparison.
    """

    id: str
    chosen_idx: int
    rejected_idx: tuple[int, ...]
    verdicts: Mapping[tuple[int, int], int]

    @classmethod
    def from_matrix(
        cls,
        sample_id: str,
        matrix: ComparisonMatrix,
        chosen_idx: int,
        rejected_idx: Sequence[int],
    ) -> "AccuracySample":
        indices = [chosen_idx, *rejected_idx]
        if len(set(indices)) != len(indices):
            raise ValidationError(f"sample {sample_id}: chosen/rejected indices overlap")
        for idx in indices:
            if not 0 <= idx < matrix.g:
                raise ValidationError(
                    f"sample {sample_id}: index {idx} out of range for g={matrix.g}"
                )
        verdicts = {
            (chosen_idx, r): int(matrix.entries[chosen_idx, r]) for r in rejected_idx
        }
        return cls(
            id=str(sample_id),
            chosen_idx=chosen_idx,
            rejected_idx=tuple(rejected_idx),
            verdicts=verdicts,
        )


@dataclass(frozen=True)
class AccuracyReport:
    total_comparisons: int
    correct: int
    accuracy_percent: float
    per_sample: tuple[dict, ...] = field(default_factory=tuple)

    def to_json_dict(self) -> dict:
        return {
            "total_comparisons": self.total_comparisons,
            "correct": self.correct,
            "accuracy_percent": self.accuracy_percent,
            "per_sample": list(self.per_sample),
        }


def compute_accuracy(samples: Iterable[AccuracySample]) -> AccuracyReport:
    """Fraction of (chosen, reject) comparisons where the chosen response won.

    Ties and wrong winners both count as incorrect. Every (chosen, reject)
    pair must carry a verdict; gaps are a validation error.
    """
    total = 0
    correct = 0
    per_sample: list[dict] = []
    missing: list[str] = []
    for sample in samples:
        sample_correct = 0
        for reject in sample.rejected_idx:
            key = (sample.chosen_idx, reject)
            if key not in sample.verdicts:
                missing.append(f"{sample.id}:{key}")
                continue
            total += 1
            if sample.verdicts[key] > 0:
                sample_correct += 1
                correct += 1
        per_sample.append(
            {
                "id": sample.id,
                "comparisons": len(sample.rejected_idx),
                "correct": sample_correct,
            }
        )
    if missing:
        raise ValidationError(f"missing verdicts for: {', '.join(missing)}")
    if total == 0:
        raise ValidationError("accuracy is undefined over zero comparisons")
    return AccuracyReport(
        total_comparisons=total,
        correct=correct,
        accuracy_percent=100.0 * correct / total,
        per_sample=tuple(per_sample),
    )


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation of two equal-length series."""
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValidationError("pearson requires two equal-length 1-d series")
    if xs.size < 2:
        raise ValidationError("pearson requires at least two points")
    if xs.std() == 0.0 or ys.std() == 0.0:
        raise ValidationError("pearson is undefined for zero-variance input")
    return float(np.corrcoef(xs, ys)[0, 1])


def render_cdr_table(report: CdrReport) -> str:
    lines = [
        f"{'sample':<24} {'g':>3} {'conflict':>8}  members",
        "-" * 56,
    ]
    for s in report.per_sample:
        members = "; ".join(",".join(map(str, c)) for c in s.conflict_members) or "-"
        lines.append(f"{s.id:<24} {s.g:>3} {'yes' if s.has_conflict else 'no':>8}  {members}")
    lines.append("-" * 56)
    lines.append(
        f"conflicted {report.conflicted_samples}/{report.total_samples} "
        f"(skipped {report.skipped_samples})  CDR = {report.cdr_percent:.2f}%"
    )
    return "\n".join(lines)


def render_accuracy_table(report: AccuracyReport) -> str:
    lines = [
        f"{'sample':<24} {'comparisons':>11} {'correct':>8}",
        "-" * 46,
    ]
    for s in report.per_sample:
        lines.append(f"{s['id']:<24} {s['comparisons']:>11} {s['correct']:>8}")
    lines.append("-" * 46)
    lines.append(
        f"correct {report.correct}/{report.total_comparisons}  "
        f"accuracy = {report.accuracy_percent:.2f}%"
    )
    return "\n".join(lines)
