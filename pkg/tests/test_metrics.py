"""Conflict rate, accuracy, and correlation diagnostics."""

import numpy as np
import pytest

from deconflict.errors import ValidationError
from deconflict.graphs import ComparisonMatrix
from deconflict.metrics import (
    AccuracySample,
    compute_accuracy,
    compute_cdr,
    pearson,
    render_accuracy_table,
    render_cdr_table,
)

CYCLE3 = ComparisonMatrix([[0, 1, -1], [-1, 0, 1], [1, -1, 0]])
CHAIN3 = ComparisonMatrix([[0, 1, 1], [-1, 0, 1], [-1, -1, 0]])


def planted_dataset(n_conflicted, n_clean):
    samples = [(f"bad-{i}", CYCLE3) for i in range(n_conflicted)]
    samples += [(f"good-{i}", CHAIN3) for i in range(n_clean)]
    return samples


class TestCdr:
    def test_three_in_ten(self):
        report = compute_cdr(planted_dataset(3, 7))
        assert report.cdr_percent == 30.0
        assert report.conflicted_samples == 3
        assert report.total_samples == 10

    def test_all_clean(self):
        assert compute_cdr(planted_dataset(0, 5)).cdr_percent == 0.0

    def test_single_conflicted(self):
        assert compute_cdr(planted_dataset(1, 0)).cdr_percent == 100.0

    def test_small_groups_skipped_not_counted(self):
        samples = planted_dataset(1, 1) + [("tiny", ComparisonMatrix([[0]]))]
        report = compute_cdr(samples)
        assert report.total_samples == 2
        assert report.skipped_samples == 1
        assert report.cdr_percent == 50.0

    def test_empty_stream_is_error(self):
        with pytest.raises(ValidationError, match="undefined"):
            compute_cdr([])
        with pytest.raises(ValidationError):
            compute_cdr([("tiny", ComparisonMatrix([[0]]))])

    def test_conflict_members_listed(self):
        report = compute_cdr([("s", CYCLE3)])
        assert report.per_sample[0].conflict_members == ((0, 1, 2),)

    def test_invariant_under_response_permutation(self):
        perm = [2, 0, 1]
        a = compute_cdr([("s", CYCLE3), ("t", CHAIN3)])
        b = compute_cdr([("s", CYCLE3.permuted(perm)), ("t", CHAIN3.permuted(perm))])
        assert a.cdr_percent == b.cdr_percent

    def test_pairs_only_dataset_is_clean(self):
        pair = ComparisonMatrix([[0, 1], [-1, 0]])
        report = compute_cdr([(f"p{i}", pair) for i in range(8)])
        assert report.cdr_percent == 0.0


def reward_bench_sample(sample_id, wins):
    """One chosen response (index 0) vs three rejects; wins[i] is the verdict."""
    return AccuracySample(
        id=sample_id,
        chosen_idx=0,
        rejected_idx=(1, 2, 3),
        verdicts={(0, 1): wins[0], (0, 2): wins[1], (0, 3): wins[2]},
    )


class TestAccuracy:
    def test_chosen_sweeps_all(self):
        report = compute_accuracy([reward_bench_sample("a", (1, 1, 1))])
        assert report.accuracy_percent == 100.0
        assert report.total_comparisons == 3

    def test_two_of_three(self):
        report = compute_accuracy([reward_bench_sample("a", (1, 1, -1))])
        assert report.accuracy_percent == pytest.approx(66.67, abs=0.01)

    def test_two_samples_half_correct(self):
        report = compute_accuracy(
            [
                reward_bench_sample("a", (1, 1, -1)),
                reward_bench_sample("b", (1, 0, -1)),
            ]
        )
        assert report.total_comparisons == 6
        assert report.correct == 3
        assert report.accuracy_percent == 50.0

    def test_tie_counts_incorrect(self):
        report = compute_accuracy([reward_bench_sample("a", (0, 0, 0))])
        assert report.accuracy_percent == 0.0

    def test_missing_verdicts_listed(self):
        broken = AccuracySample(
            id="gap", chosen_idx=0, rejected_idx=(1, 2), verdicts={(0, 1): 1}
        )
        with pytest.raises(ValidationError, match=r"gap:\(0, 2\)"):
            compute_accuracy([broken])

    def test_from_matrix(self):
        entries = np.zeros((4, 4), dtype=np.int8)
        entries[0, 1:] = 1
        entries[1:, 0] = -1
        sample = AccuracySample.from_matrix("m", ComparisonMatrix(entries), 0, [1, 2, 3])
        assert compute_accuracy([sample]).accuracy_percent == 100.0

    def test_overlapping_indices_rejected(self):
        with pytest.raises(ValidationError, match="overlap"):
            AccuracySample.from_matrix("m", CHAIN3, 0, [0, 1])

    def test_label_shuffle_changes_accuracy_not_cdr(self):
        entries = np.zeros((4, 4), dtype=np.int8)
        entries[0, 1:] = 1
        entries[1:, 0] = -1
        m = ComparisonMatrix(entries)
        acc_good = compute_accuracy([AccuracySample.from_matrix("s", m, 0, [1, 2, 3])])
        acc_bad = compute_accuracy([AccuracySample.from_matrix("s", m, 1, [0, 2, 3])])
        assert acc_good.accuracy_percent != acc_bad.accuracy_percent
        assert compute_cdr([("s", m)]).cdr_percent == 0.0  # labels never matter here


class TestPearson:
    def test_prompt_characteristics_row(self):
        # CDR-vs-accuracy across four judge prompts; the published correlation.
        r = pearson([6.7, 5.7, 2.3, 6.3], [85.7, 82.0, 76.8, 84.2])
        assert r == pytest.approx(0.98, abs=0.01)

    def test_perfect_correlation(self):
        assert pearson([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)

    def test_perfect_anticorrelation(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_zero_variance_rejected(self):
        with pytest.raises(ValidationError, match="variance"):
            pearson([1, 1, 1], [1, 2, 3])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            pearson([1, 2], [1, 2, 3])


def test_tables_render():
    cdr = compute_cdr(planted_dataset(1, 1))
    acc = compute_accuracy([reward_bench_sample("a", (1, 1, -1))])
    assert "CDR = 50.00%" in render_cdr_table(cdr)
    assert "66.67%" in render_accuracy_table(acc)
