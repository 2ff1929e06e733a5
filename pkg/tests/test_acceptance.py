"""Acceptance suite: one test per release criterion, oracle-refereed.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass line per
criterion. Everything here is hermetic: synthetic data and in-process stub
judges only.
"""

import hashlib
import json
import threading
import time
from collections import Counter

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from deconflict.cli import main as cli_main
from deconflict.graphs import ComparisonMatrix, PreferenceGraph, build_graph, has_conflicts, scc
from deconflict.judge.gateway import JudgeConfig, JudgeGateway
from deconflict.judge.prompts import render_prompt
from deconflict.judge.transport import PreferFirstSlotJudge
from deconflict.metrics import AccuracySample, compute_accuracy, compute_cdr, pearson
from deconflict.records import matrix_to_record
from deconflict.resolve import min_fas_eades, min_fas_exact, resolve, resolve_random, resolve_reverse
from deconflict.rewards import (
    elo_ratings,
    elo_rewards,
    group_advantages,
    listwise_rewards,
    net_win_scores,
    pointwise_rewards,
    RewardVector,
)
from deconflict.service import create_app
from deconflict.synth import synth_dataset

from oracles import (
    all_semicomplete_matrices,
    brute_min_back_edges,
    closure_has_cycle,
    edges_to_matrix,
    random_dag,
    random_semicomplete,
)

RANDOM_INSTANCES_PER_SIZE = 20_000
CYCLE3 = PreferenceGraph(3, frozenset({(0, 1), (1, 2), (2, 0)}))


def passed(number: int, text: str) -> None:
    print(f"[acceptance] criterion {number:02d} PASS — {text}")


@pytest.fixture(scope="module")
def instance_corpus():
    """Exhaustive n<=4 plus seeded random instances for n=5 and n=6.

    Each entry: (n, edge frozenset, exact solution size, oracle minimum).
    Shared by the exactness and detection-equivalence criteria.
    """
    corpus = []
    for n in (1, 2, 3, 4):
        for entries in all_semicomplete_matrices(n):
            g = build_graph(ComparisonMatrix(entries))
            corpus.append(
                (n, g.edges, len(min_fas_exact(g).removed_edges),
                 brute_min_back_edges(n, g.edges))
            )
    rng = np.random.default_rng(20_260_810)
    for n in (5, 6):
        for _ in range(RANDOM_INSTANCES_PER_SIZE):
            edges = frozenset(random_semicomplete(n, rng, tie_prob=1 / 3))
            g = PreferenceGraph(n, edges)
            corpus.append(
                (n, edges, len(min_fas_exact(g).removed_edges),
                 brute_min_back_edges(n, edges))
            )
    return corpus


def test_criterion_01_fas_exactness(instance_corpus):
    """Exact solver matches the all-orderings brute-force minimum everywhere."""
    start = time.time()
    mismatches = [
        (n, sorted(edges), got, want)
        for n, edges, got, want in instance_corpus
        if got != want
    ]
    assert mismatches == []
    elapsed = time.time() - start
    assert elapsed < 300
    exhaustive = sum(1 for n, *_ in instance_corpus if n <= 4)
    passed(1, f"{len(instance_corpus)} instances ({exhaustive} exhaustive), 0 mismatches")


def test_criterion_02_conflict_detection_equivalence(instance_corpus):
    """has_conflicts <=> positive minimum arc set <=> closure cycle."""
    for n, edges, exact_size, _ in instance_corpus:
        matrix = ComparisonMatrix(edges_to_matrix(n, edges))
        cyc = closure_has_cycle(n, edges)
        assert has_conflicts(matrix) == cyc
        assert (exact_size > 0) == cyc
    passed(2, f"three detection routes agree on all {len(instance_corpus)} instances")


def test_criterion_03_heuristic_sandwich_and_idempotence():
    rng = np.random.default_rng(7_341)
    checked = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 9))
        g = PreferenceGraph(n, frozenset(random_semicomplete(n, rng, tie_prob=1 / 3)))
        exact = min_fas_exact(g)
        eades = min_fas_eades(g)
        assert 0 <= len(exact.removed_edges) <= len(eades.removed_edges) <= len(g.edges)
        assert resolve(resolve(g).dag).removed_edges == frozenset()
        checked += 1
    passed(3, f"0 <= |exact| <= |greedy| <= |E| and idempotence on {checked} instances")


def test_criterion_04_reward_invariants():
    rng = np.random.default_rng(555)
    degenerate_seen = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 10))
        g = PreferenceGraph(n, frozenset(random_dag(n, rng)))
        rewards = net_win_scores(resolve(g))
        assert sum(rewards.scores) == 0
        assert all(abs(s) <= n - 1 for s in rewards.scores)
        adv = group_advantages(rewards)
        values = np.asarray(adv.values)
        if adv.degenerate:
            degenerate_seen += 1
            assert np.all(values == 0.0)
        else:
            assert abs(values.mean()) < 1e-9
            assert abs(values.std() - 1.0) < 1e-9
    for g_size in range(2, 11):
        scores = listwise_rewards(list(range(g_size))).scores
        assert abs(sum(scores)) < 1e-12
        assert max(scores) == 1.0 and min(scores) == -1.0
    passed(4, f"10000 random DAGs (incl. {degenerate_seen} degenerate groups), listwise G=2..10")


def test_criterion_05_elo_conservation_and_contract():
    rng = np.random.default_rng(99)
    for _ in range(1_000):
        n = int(rng.integers(2, 9))
        matrix = ComparisonMatrix(edges_to_matrix(n, random_semicomplete(n, rng)))
        _, _, _, history = elo_ratings(matrix)
        assert np.all(np.abs(history - 1500.0 * n) < 1e-6)
    assert elo_rewards(ComparisonMatrix([[0, 1], [-1, 0]])).scores == (1.0, -1.0)
    assert elo_rewards(ComparisonMatrix(np.zeros((4, 4), dtype=int))).scores == (0.0,) * 4
    passed(5, "rating sum = 1500*G (+-1e-6) on 1000 matrices; endpoint contracts hold")


def test_criterion_06_correlation_reproduction():
    r = pearson([6.7, 5.7, 2.3, 6.3], [85.7, 82.0, 76.8, 84.2])
    assert r == pytest.approx(0.98, abs=0.01)
    passed(6, f"conflict-vs-accuracy correlation r = {r:.4f} (target 0.98 +- 0.01)")


def test_criterion_07_cdr_exactness():
    cycle = ComparisonMatrix([[0, 1, -1], [-1, 0, 1], [1, -1, 0]])
    chain = ComparisonMatrix([[0, 1, 1], [-1, 0, 1], [-1, -1, 0]])
    for k, n in ((0, 10), (3, 10), (10, 10)):
        samples = [(f"c{i}", cycle) for i in range(k)]
        samples += [(f"t{i}", chain) for i in range(n - k)]
        assert compute_cdr(samples).cdr_percent == 100.0 * k / n
    assert compute_cdr(synth_dataset(120, g=6, noise=0.0, seed=4)).cdr_percent == 0.0
    assert compute_cdr(synth_dataset(120, g=2, noise=6.0, seed=4)).cdr_percent == 0.0
    passed(7, "planted rates exact for k/N in {0,3,10}/10; noiseless and G=2 datasets clean")


def test_criterion_08_cdr_monotone_in_noise():
    noise_levels = (0.0, 0.5, 1.0, 2.0, 4.0)
    means = []
    for noise in noise_levels:
        cdrs = [
            compute_cdr(synth_dataset(40, g=6, noise=noise, seed=seed)).cdr_percent
            for seed in range(20)
        ]
        means.append(float(np.mean(cdrs)))
    drops = [max(0.0, means[i] - means[i + 1]) for i in range(len(means) - 1)]
    assert sum(1 for d in drops if d > 1e-12) <= 1
    assert max(drops) <= 2.0
    passed(8, "mean CDR over 20 seeds: " + " -> ".join(f"{m:.1f}" for m in means))


def test_criterion_09_accuracy_algorithm():
    def sample(sample_id, verdicts):
        return AccuracySample(
            id=sample_id,
            chosen_idx=0,
            rejected_idx=(1, 2, 3),
            verdicts={(0, r): v for r, v in zip((1, 2, 3), verdicts)},
        )

    hand_sets = [
        ([(1, 1, 1)], 100.0),
        ([(1, 1, -1)], 66.67),
        ([(1, 1, 1), (1, 1, 1)], 100.0),
        ([(1, 0, -1), (1, 1, -1)], 50.0),
        ([(0, 0, 0)], 0.0),
    ]
    for verdict_sets, expected in hand_sets:
        samples = [sample(f"s{i}", v) for i, v in enumerate(verdict_sets)]
        report = compute_accuracy(samples)
        assert report.total_comparisons == 3 * len(verdict_sets)
        correct = sum(1 for vs in verdict_sets for v in vs if v > 0)
        assert report.correct == correct
        assert report.accuracy_percent == pytest.approx(expected, abs=0.01)
        assert report.accuracy_percent == pytest.approx(
            100.0 * correct / (3 * len(verdict_sets)), abs=1e-9
        )
    passed(9, "accuracy = 100*correct/(3N) on hand-built verdict sets incl. 66.67% case")


def test_criterion_10_prompt_goldens(request):
    golden_dir = request.path.parent / "goldens"
    query = "How many leap years fall between 2001 and 2100?"
    a0 = "There are 24 leap years in that span; 2100 is skipped by the century rule."
    a1 = "Exactly 25, one every four years without exception."
    a2 = "Impossible to say without knowing the calendar system."
    for prompt_id in ("P1", "P2", "P3", "P4", "P5"):
        rendered = render_prompt(prompt_id, query, [a0, a1])
        assert rendered == (golden_dir / f"prompt_{prompt_id}.txt").read_text("utf-8")
    assert render_prompt("pointwise", query, [a0]) == (
        golden_dir / "prompt_pointwise.txt"
    ).read_text("utf-8")
    assert render_prompt("listwise", query, [a0, a1, a2]) == (
        golden_dir / "prompt_listwise.txt"
    ).read_text("utf-8")
    passed(10, "P1-P5, pointwise, and listwise renders byte-match their goldens")


class RobustnessProbeJudge:
    """Fault-injecting stub: 20% malformed pairs, 10% transport failures.

    Decisions are pure hashes of (seed, pair signature[, attempt]) so the test
    can replay the schedule and demand exact counts. Also tracks concurrent
    in-flight calls and per-pair attempts.
    """

    def __init__(self, responses, seed=0, delay=0.002):
        self.responses = list(responses)
        self.seed = seed
        self.delay = delay
        self.attempts = Counter()
        self.in_flight = 0
        self.peak_in_flight = 0
        self._lock = threading.Lock()

    @staticmethod
    def _unit(*parts) -> float:
        digest = hashlib.sha256(":".join(map(str, parts)).encode()).digest()
        return int.from_bytes(digest[:8], "little") / 2**64

    def signature(self, prompt):
        hits = sorted(
            (prompt.find(t), i) for i, t in enumerate(self.responses) if t in prompt
        )
        return tuple(i for _, i in hits)

    def transport_fails(self, sig, attempt):
        return self._unit(self.seed, "transport", sig, attempt) < 0.10

    def is_malformed(self, sig):
        return self._unit(self.seed, "malformed", sig) < 0.20

    def complete(self, prompt):
        sig = self.signature(prompt)
        with self._lock:
            attempt = self.attempts[sig]
            self.attempts[sig] += 1
            self.in_flight += 1
            self.peak_in_flight = max(self.peak_in_flight, self.in_flight)
        time.sleep(self.delay)
        with self._lock:
            self.in_flight -= 1
        if self.transport_fails(sig, attempt):
            raise ConnectionError(f"injected failure for {sig}")
        if self.is_malformed(sig):
            return "total nonsense, no tags anywhere"
        i, j = sig
        return f"<best_answer>{'A' if i < j else 'B'}</best_answer>"


def test_criterion_11_gateway_robustness():
    g = 8
    max_in_flight = 4
    responses = [f"probe-response-{i}" for i in range(g)]
    total_transport = 0
    total_parse = 0
    # retry_limit=0 rounds make ~10% of pairs genuinely exhaust their budget,
    # exercising the transport-fallback accounting, not just the parse path.
    for seed, retry_limit in ((0, 2), (1, 2), (2, 0), (3, 0)):
        judge = RobustnessProbeJudge(responses, seed=seed)
        gateway = JudgeGateway(
            judge,
            JudgeConfig(
                prompt_id="P1",
                max_in_flight=max_in_flight,
                retry_limit=retry_limit,
                retry_backoff_ms=0,
            ),
        )
        result = gateway.collect_matrix("q", responses)

        entries = result.matrix.entries  # construction validated antisymmetry
        assert entries.shape == (g, g)
        assert judge.peak_in_flight <= max_in_flight
        assert max(judge.attempts.values()) <= retry_limit + 1

        expected_transport = 0
        expected_parse = 0
        for i in range(g):
            for j in range(i + 1, g):
                sig = (i, j)
                if all(judge.transport_fails(sig, a) for a in range(retry_limit + 1)):
                    expected_transport += 1
                    assert entries[i, j] == 0
                elif judge.is_malformed(sig):
                    expected_parse += 1
                    assert entries[i, j] == 0
                else:
                    assert entries[i, j] == 1
        assert result.report.transport_failures == expected_transport
        assert result.report.parse_fallbacks == expected_parse
        assert result.report.fallback_verdicts == expected_transport + expected_parse
        total_transport += expected_transport
        total_parse += expected_parse
    assert total_transport > 0  # the exhaustion path really ran
    assert total_parse > 0
    passed(
        11,
        f"legal matrices, bound {max_in_flight} respected, retries capped, "
        f"exact counts ({total_transport} transport / {total_parse} parse fallbacks)",
    )


def test_criterion_12_library_service_equivalence(tmp_path, monkeypatch):
    for key in ("JUDGE_API_BASE", "JUDGE_API_KEY", "JUDGE_MODEL", "DECONFLICT_CACHE_DIR"):
        monkeypatch.delenv(key, raising=False)
    config = JudgeConfig(prompt_id="P1", max_in_flight=4, retry_limit=1, retry_backoff_ms=0)
    client = TestClient(create_app(JudgeGateway(PreferFirstSlotJudge(), config)))
    runner = CliRunner()

    fixtures = [
        ("fx-dgr", "dgr", 4, 7),
        ("fx-pref", "pref", 4, None),
        ("fx-elo", "elo", 3, None),
        ("fx-rand", "dgr-random", 5, 11),
        ("fx-rev", "dgr-reverse", 5, 11),
        ("fx-lw", "listwise", 4, None),
        ("fx-pw", "pointwise", 3, None),
    ]
    for fixture_id, strategy, g, seed in fixtures:
        responses = [f"candidate-{fixture_id}-{i}" for i in range(g)]
        body = {
            "id": fixture_id,
            "query": "pick the strongest answer",
            "responses": responses,
            "strategy": strategy,
        }
        if seed is not None:
            body["seed"] = seed
        service_bytes = client.post("/v1/rewards", json=body).content

        sample_path = tmp_path / f"{fixture_id}.jsonl"
        sample_path.write_text(
            json.dumps({"id": fixture_id, "query": body["query"], "responses": responses})
            + "\n",
            encoding="utf-8",
        )
        args = ["score", "--input", str(sample_path), "--strategy", strategy,
                "--judge-kind", "stub"]
        if seed is not None:
            args += ["--seed", str(seed)]
        result = runner.invoke(cli_main, args)
        assert result.exit_code == 0, result.output
        assert result.output.strip().encode("utf-8") == service_bytes
    passed(12, f"POST /v1/rewards byte-matches cli score on {len(fixtures)} fixtures")


def test_criterion_13_ablation_variant_contracts():
    rng = np.random.default_rng(404)
    conflict_free_checked = 0
    for _ in range(400):
        n = int(rng.integers(2, 8))
        g = PreferenceGraph(n, frozenset(random_semicomplete(n, rng)))
        seed = int(rng.integers(0, 2**31))
        if scc(g).has_conflict:
            continue
        base = net_win_scores(resolve(g)).scores
        assert net_win_scores(resolve_random(g, seed)).scores == base
        assert net_win_scores(resolve_reverse(g, seed)).scores == base
        conflict_free_checked += 1
    assert conflict_free_checked > 50

    removed = resolve(CYCLE3)
    randomized = resolve_random(CYCLE3, seed=21)
    reversed_ = resolve_reverse(CYCLE3, seed=21)
    assert len(removed.removed_edges) == 1
    assert len(randomized.removed_edges) == 1
    assert len(reversed_.dag.edges) == len(CYCLE3.edges)
    assert len(reversed_.reversed_edges) == 1

    for seed in (0, 1, 99):
        assert resolve_random(CYCLE3, seed) == resolve_random(CYCLE3, seed)
        assert resolve_reverse(CYCLE3, seed) == resolve_reverse(CYCLE3, seed)
    passed(
        13,
        f"variants identical on {conflict_free_checked} conflict-free inputs; "
        "3-cycle edits and seed reproducibility as specified",
    )
