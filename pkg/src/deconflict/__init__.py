"""Preference-signal purification: conflict detection and deconflicted rewards.

Raw pairwise LLM-judge verdicts frequently contradict themselves (A beats B
beats C beats A). This package detects those cycles, removes a minimum
feedback arc set to restore consistency, and converts the result into reward
and advantage signals for group-based policy optimizers — as a library, a
CLI, and an HTTP service.
"""

__version__ = "0.1.0"

from .graphs import (
    ComparisonMatrix,
    PreferenceGraph,
    SccDecomposition,
    build_graph,
    find_cycle,
    has_conflicts,
    scc,
)
from .metrics import (
    AccuracyReport,
    AccuracySample,
    CdrReport,
    compute_accuracy,
    compute_cdr,
    pearson,
)
from .resolve import (
    FasSolution,
    min_fas_eades,
    min_fas_exact,
    resolve,
    resolve_random,
    resolve_reverse,
)
from .rewards import (
    STRATEGIES,
    AdvantageVector,
    RewardVector,
    compute_strategy,
    elo_rewards,
    group_advantages,
    listwise_rewards,
    net_win_scores,
    pointwise_rewards,
    pref_win_rate,
)
from .synth import SynthSpec, synth_dataset, synth_matrix, synth_verdict

__all__ = [
    "__version__",
    "ComparisonMatrix",
    "PreferenceGraph",
    "SccDecomposition",
    "build_graph",
    "find_cycle",
    "has_conflicts",
    "scc",
    "AccuracyReport",
    "AccuracySample",
    "CdrReport",
    "compute_accuracy",
    "compute_cdr",
    "pearson",
    "FasSolution",
    "min_fas_eades",
    "min_fas_exact",
    "resolve",
    "resolve_random",
    "resolve_reverse",
    "STRATEGIES",
    "AdvantageVector",
    "RewardVector",
    "compute_strategy",
    "elo_rewards",
    "group_advantages",
    "listwise_rewards",
    "net_win_scores",
    "pointwise_rewards",
    "pref_win_rate",
    "SynthSpec",
    "synth_dataset",
    "synth_matrix",
    "synth_verdict",
]
