"""HTTP service: endpoints, error mapping, CLI equivalence."""

import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from deconflict.cli import main as cli_main
from deconflict.graphs import ComparisonMatrix
from deconflict.judge.gateway import JudgeConfig, JudgeGateway
from deconflict.judge.transport import CallableJudge, PreferFirstSlotJudge
from deconflict.records import matrix_to_record
from deconflict.service import create_app

CYCLE3 = ComparisonMatrix([[0, 1, -1], [-1, 0, 1], [1, -1, 0]])


@pytest.fixture
def stub_client():
    config = JudgeConfig(prompt_id="P1", max_in_flight=4, retry_limit=1, retry_backoff_ms=0)
    gateway = JudgeGateway(PreferFirstSlotJudge(), config)
    return TestClient(create_app(gateway))


def reward_body(**overrides):
    body = {
        "id": "fixture-1",
        "query": "which answer is best?",
        "responses": ["resp-a", "resp-b", "resp-c", "resp-d"],
        "strategy": "dgr",
    }
    body.update(overrides)
    return body


class TestHealthz:
    def test_ok(self, stub_client):
        response = stub_client.get("/healthz")
        assert response.status_code == 200
        assert response.json()["status"] == "ok"

    def test_never_calls_the_judge(self):
        calls = []

        def counting(prompt):
            calls.append(prompt)
            return "<best_answer>A</best_answer>"

        gateway = JudgeGateway(CallableJudge(counting), JudgeConfig())
        client = TestClient(create_app(gateway))
        for _ in range(3):
            assert client.get("/healthz").status_code == 200
        assert calls == []


class TestRewards:
    def test_transitive_fixture(self, stub_client):
        response = stub_client.post("/v1/rewards", json=reward_body())
        assert response.status_code == 200
        doc = response.json()
        assert doc["scores"] == [3, 1, -1, -3]
        assert doc["advantages"] == pytest.approx(
            [1.3416, 0.4472, -0.4472, -1.3416], abs=1e-3
        )

    def test_single_response_dgr_is_422(self, stub_client):
        response = stub_client.post(
            "/v1/rewards", json=reward_body(responses=["lonely"])
        )
        assert response.status_code == 422

    def test_unknown_strategy_is_422(self, stub_client):
        response = stub_client.post("/v1/rewards", json=reward_body(strategy="votes"))
        assert response.status_code == 422

    def test_malformed_body_is_400_with_path(self, stub_client):
        response = stub_client.post("/v1/rewards", json={"id": "x", "query": "q"})
        assert response.status_code == 400
        detail = response.json()["detail"]
        paths = {tuple(err["path"]) for err in detail}
        assert ("body", "responses") in paths

    def test_invalid_json_is_400(self, stub_client):
        response = stub_client.post(
            "/v1/rewards", content=b"{not json", headers={"Content-Type": "application/json"}
        )
        assert response.status_code == 400

    def test_judge_override_swap_check(self, stub_client):
        # The slot-A stub contradicts itself under swapping: everything ties.
        response = stub_client.post(
            "/v1/rewards", json=reward_body(judge={"swap_check": True}, strategy="pref")
        )
        assert response.status_code == 200
        doc = response.json()
        assert doc["scores"] == [0.5, 0.5, 0.5, 0.5]

    def test_unknown_judge_override_is_422(self, stub_client):
        response = stub_client.post(
            "/v1/rewards", json=reward_body(judge={"verbosity": 11})
        )
        assert response.status_code == 422

    def test_transport_exhaustion_degrades_with_200(self):
        def always_down(prompt):
            raise ConnectionError("down")

        config = JudgeConfig(retry_limit=0, retry_backoff_ms=0)
        gateway = JudgeGateway(CallableJudge(always_down), config)
        client = TestClient(create_app(gateway))
        response = client.post("/v1/rewards", json=reward_body(strategy="pref"))
        assert response.status_code == 200
        doc = response.json()
        assert doc["diagnostics"]["fallback_verdicts"] == 6
        assert doc["scores"] == [0.5, 0.5, 0.5, 0.5]  # all ties


class TestCdrEndpoint:
    def test_batch(self, stub_client):
        body = {
            "samples": [
                matrix_to_record("bad", CYCLE3),
                matrix_to_record(
                    "good", ComparisonMatrix([[0, 1, 1], [-1, 0, 1], [-1, -1, 0]])
                ),
            ]
        }
        response = stub_client.post("/v1/cdr", json=body)
        assert response.status_code == 200
        doc = response.json()
        assert doc["cdr_percent"] == 50.0
        assert doc["per_sample"][0]["conflict_members"] == [[0, 1, 2]]

    def test_empty_batch_is_400(self, stub_client):
        assert stub_client.post("/v1/cdr", json={"samples": []}).status_code == 400


def test_service_matches_cli_byte_for_byte(stub_client, tmp_path, monkeypatch):
    """Same inputs, same seeds: POST /v1/rewards equals cli score output."""
    for key in ("JUDGE_API_BASE", "JUDGE_API_KEY", "JUDGE_MODEL", "DECONFLICT_CACHE_DIR"):
        monkeypatch.delenv(key, raising=False)
    body = reward_body(strategy="dgr", seed=7)
    service_bytes = stub_client.post("/v1/rewards", json=body).content

    data = tmp_path / "sample.jsonl"
    data.write_text(
        json.dumps(
            {"id": body["id"], "query": body["query"], "responses": body["responses"]}
        )
        + "\n",
        encoding="utf-8",
    )
    result = CliRunner().invoke(
        cli_main,
        ["score", "--input", str(data), "--strategy", "dgr", "--seed", "7",
         "--judge-kind", "stub"],
    )
    assert result.exit_code == 0, result.output
    cli_line = result.output.strip()
    assert cli_line.encode("utf-8") == service_bytes
