"""LLM-judge orchestration: prompt rendering, verdict parsing, collection."""

from .gateway import CollectionResult, JudgeConfig, JudgeGateway, collect_matrix
from .parsing import ParsedVerdict, parse_listwise, parse_pairwise, parse_pointwise
from .prompts import PAIRWISE_PROMPT_IDS, PROMPT_IDS, render_prompt

__all__ = [
    "CollectionResult",
    "JudgeConfig",
    "JudgeGateway",
    "collect_matrix",
    "ParsedVerdict",
    "parse_listwise",
    "parse_pairwise",
    "parse_pointwise",
    "PAIRWISE_PROMPT_IDS",
    "PROMPT_IDS",
    "render_prompt",
]
