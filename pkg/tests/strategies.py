"""Shared hypothesis strategies."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from deconflict.graphs import ComparisonMatrix


@st.composite
def comparison_matrices(draw, min_g: int = 1, max_g: int = 7) -> ComparisonMatrix:
    g = draw(st.integers(min_g, max_g))
    entries = np.zeros((g, g), dtype=np.int8)
    for i in range(g):
        for j in range(i + 1, g):
            v = draw(st.sampled_from((-1, 0, 1)))
            entries[i, j] = v
            entries[j, i] = -v
    return ComparisonMatrix(entries)


@st.composite
def permutations_of(draw, g: int) -> list[int]:
    return draw(st.permutations(list(range(g))))
