"""Judge transports: the OpenAI-compatible HTTP client and in-process stubs.

Anything with a ``complete(prompt) -> str`` method can act as a judge. The
HTTP client is the single wire transport; the stubs exist so every other
layer can be exercised hermetically.
"""

from __future__ import annotations

from typing import Callable, Optional, Protocol, Sequence

import httpx

from ..errors import TransportError
from ..synth import SynthSpec, synth_verdict


class JudgeClient(Protocol):
    def complete(self, prompt: str) -> str: ...


class OpenAiChatJudge:
    """Minimal chat-completions client; one prompt in, raw text out."""

    def __init__(
        self,
        api_base: str,
        api_key: str = "",
        model: str = "",
        temperature: float = 0.0,
        timeout_ms: int = 30_000,
    ):
        if not api_base:
            raise TransportError("judge api_base is not configured")
        self.api_base = api_base.rstrip("/")
        self.model = model
        self.temperature = temperature
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(timeout=timeout_ms / 1000.0, headers=headers)

    def complete(self, prompt: str) -> str:
        try:
            response = self._client.post(
                f"{self.api_base}/chat/completions",
                json={
                    "model": self.model,
                    "messages": [{"role": "user", "content": prompt}],
                    "temperature": self.temperature,
                },
            )
            response.raise_for_status()
            return response.json()["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError, TypeError, ValueError) as exc:
            raise TransportError(f"judge request failed: {exc}") from exc

    def close(self) -> None:
        self._client.close()


class CallableJudge:
    """Wrap any prompt->text function as a judge client."""

    def __init__(self, fn: Callable[[str], str]):
        self._fn = fn

    def complete(self, prompt: str) -> str:
        return self._fn(prompt)


class PreferFirstSlotJudge:
    """Always declares the response shown first the winner.

    Under the gateway's canonical pair orientation the first slot holds the
    lower-indexed response, so this stub yields a fully transitive matrix.
    """

    def complete(self, prompt: str) -> str:
        return "<best_answer>A</best_answer>"


def _slot_order(prompt: str, responses: Sequence[str]) -> list[int]:
    """Which known responses appear in the prompt, in order of appearance."""
    hits = []
    for idx, text in enumerate(responses):
        offset = prompt.find(text)
        if offset >= 0:
            hits.append((offset, idx))
    hits.sort()
    return [idx for _, idx in hits]


class UtilityJudge:
    """Deterministic judge that ranks known responses by planted utilities.

    Locates response texts inside the rendered prompt to learn the slot
    assignment, then answers pairwise/pointwise/listwise requests from the
    utility order. With a SynthSpec it delegates pairwise verdicts to the
    noisy synthetic model instead.
    """

    def __init__(
        self,
        responses: Sequence[str],
        utilities: Sequence[float],
        synth_spec: Optional[SynthSpec] = None,
    ):
        if len(responses) != len(utilities):
            raise ValueError("one utility per response required")
        self.responses = list(responses)
        self.utilities = [float(u) for u in utilities]
        self.synth_spec = synth_spec

    def _pairwise(self, slots: list[int]) -> str:
        i, j = slots[0], slots[1]
        if self.synth_spec is not None:
            verdict = synth_verdict(self.synth_spec, i, j)
        else:
            gap = self.utilities[i] - self.utilities[j]
            verdict = 0 if gap == 0 else (1 if gap > 0 else -1)
        winner = {1: "A", -1: "B", 0: "tie"}[verdict]
        return f"<best_answer>{winner}</best_answer>"

    def _pointwise(self, slots: list[int]) -> str:
        score = int(round(min(10, max(1, self.utilities[slots[0]]))))
        return f"<score>{score}</score>"

    def _listwise(self, slots: list[int]) -> str:
        ranked = sorted(range(len(slots)), key=lambda s: -self.utilities[slots[s]])
        letters = ", ".join(chr(ord("A") + s) for s in ranked)
        return f"<ranking>{letters}</ranking>"

    def complete(self, prompt: str) -> str:
        slots = _slot_order(prompt, self.responses)
        if "<score>" in prompt:
            return self._pointwise(slots)
        if "<ranking>" in prompt:
            return self._listwise(slots)
        return self._pairwise(slots)
