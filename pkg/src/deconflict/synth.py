"""Synthetic judge with planted latent utilities and controllable noise.

Verdicts follow a logistic (Bradley-Terry) choice on the utility gap, with a
temperature knob for intransitivity and a tie band for draws. Every verdict
is derived by hashing (seed, pair), not by a stateful generator, so results
are independent of evaluation order and safe to collect in parallel.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ValidationError
from .graphs import ComparisonMatrix

MIN_TEMPERATURE = 1e-9


@dataclass(frozen=True)
class SynthSpec:
    """Latent utilities plus the noise/tie knobs for one response group."""

    g: int
    utilities: tuple[float, ...]
    noise: float = 0.0
    tie_band: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.g < 1:
            raise ValidationError(f"group size must be >= 1, got {self.g}")
        if len(self.utilities) != self.g:
            raise ValidationError(
                f"expected {self.g} utilities, got {len(self.utilities)}"
            )
        if self.noise < 0:
            raise ValidationError("noise must be >= 0")
        if self.tie_band < 0:
            raise ValidationError("tie band must be >= 0")
        object.__setattr__(self, "utilities", tuple(float(u) for u in self.utilities))


def _unit_from_hash(seed: int, a: int, b: int) -> float:
    digest = hashlib.sha256(struct.pack("<qqq", seed, a, b)).digest()
    return int.from_bytes(digest[:8], "little") / 2**64


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def synth_verdict(spec: SynthSpec, i: int, j: int) -> int:
    """Deterministic {-1, 0, +1} verdict for the ordered pair (i, j)."""
    if i == j:
        raise ValidationError("cannot compare a response with itself")
    for idx in (i, j):
        if not 0 <= idx < spec.g:
            raise ValidationError(f"index {idx} out of range for g={spec.g}")
    a, b = (i, j) if i < j else (j, i)
    gap = spec.utilities[a] - spec.utilities[b]
    if abs(gap) < spec.tie_band:
        return 0
    p_a_wins = _sigmoid(gap / max(spec.noise, MIN_TEMPERATURE))
    draw = _unit_from_hash(spec.seed, a, b)
    verdict = 1 if draw < p_a_wins else -1
    return verdict if (i, j) == (a, b) else -verdict


def synth_matrix(spec: SynthSpec) -> ComparisonMatrix:
    """Judge every pair of the group into one antisymmetric matrix."""
    entries = np.zeros((spec.g, spec.g), dtype=np.int8)
    for i in range(spec.g):
        for j in range(i + 1, spec.g):
            v = synth_verdict(spec, i, j)
            entries[i, j] = v
            entries[j, i] = -v
    return ComparisonMatrix(entries)


def synth_dataset(
    n_samples: int,
    g: int,
    noise: float = 0.0,
    tie_band: float = 0.0,
    seed: int = 0,
) -> Iterator[tuple[str, ComparisonMatrix]]:
    """Stream (id, matrix) pairs with independent per-sample utilities.

    Utilities are standard normal draws; each sample gets its own verdict
    seed, both derived reproducibly from the master seed.
    """
    if n_samples < 1:
        raise ValidationError(f"need at least one sample, got {n_samples}")
    for k, child in enumerate(np.random.SeedSequence(seed).spawn(n_samples)):
        rng = np.random.default_rng(child)
        utilities = tuple(float(u) for u in rng.normal(0.0, 1.0, size=g))
        verdict_seed = int(rng.integers(0, 2**62))
        spec = SynthSpec(
            g=g,
            utilities=utilities,
            noise=noise,
            tie_band=tie_band,
            seed=verdict_seed,
        )
        yield f"synth-{k:05d}", synth_matrix(spec)
