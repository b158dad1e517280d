"""Partisan judging in boxing: scoring-rule analysis and simulation."""

from ringside.model import (
    BoutConfig,
    CardResult,
    Corner,
    JudgeProfile,
    Outcome,
    ScoringRule,
    backlash,
    bout_outcome,
    card_result,
    count_result_flipping_pairs,
    enumerate_exact,
    round_winner,
    sample_signals,
    sample_true_sequence,
)
from ringside.exact import CardProbTriple, OutcomeDist
from ringside.strategy import (
    CriticalS,
    PartisanStrategy,
    best_response,
    best_response_table,
    critical_s_closed_form,
    critical_s_numeric,
    expected_utility,
    win_curve,
)
from ringside.montecarlo import CampaignSpec, TallyTable, robbery_ratio, run_campaign
from ringside.estimator import PartisanBoutModel

__version__ = "0.1.0"

__all__ = [
    "BoutConfig",
    "CampaignSpec",
    "CardProbTriple",
    "CardResult",
    "Corner",
    "CriticalS",
    "JudgeProfile",
    "Outcome",
    "OutcomeDist",
    "PartisanBoutModel",
    "PartisanStrategy",
    "ScoringRule",
    "TallyTable",
    "backlash",
    "best_response",
    "best_response_table",
    "bout_outcome",
    "card_result",
    "count_result_flipping_pairs",
    "critical_s_closed_form",
    "critical_s_numeric",
    "enumerate_exact",
    "expected_utility",
    "robbery_ratio",
    "round_winner",
    "run_campaign",
    "sample_signals",
    "sample_true_sequence",
    "win_curve",
]
