"""Partisan best responses, favouritism thresholds and win-probability curves."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from ringside._validation import check_alpha, check_count
from ringside.exact import bout_dist, expected_backlash, f_two_of_three, outcome_given_truth
from ringside.model import BoutConfig, ScoringRule, canonical_award

INFO_SETS_3 = {"RRR": 0, "BRR": 1, "BBR": 2, "BBB": 3}
INFO_SET_NAMES_3 = {v: k for k, v in INFO_SETS_3.items()}

# Ties within this margin go to the smaller award.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class PartisanStrategy:
    """Award ``k_awarded`` rounds to Blue under the canonical flip order."""

    k_awarded: int
    flip_policy: str = "canonical"

    def __post_init__(self):
        if self.k_awarded < 0:
            raise ValueError("k_awarded must be nonnegative")
        if self.flip_policy != "canonical":
            raise ValueError("only the canonical flip policy is supported")

    def award(self, observed):
        observed = np.asarray(observed, dtype=bool)
        if self.k_awarded > observed.shape[-1]:
            raise ValueError("k_awarded exceeds the number of rounds")
        return canonical_award(observed, self.k_awarded)


@dataclass(frozen=True)
class CriticalS:
    rule: ScoringRule
    info_set: int
    alpha: float
    s_hat: float
    method: str

    @property
    def info_set_name(self):
        return INFO_SET_NAMES_3.get(self.info_set, str(self.info_set))


@dataclass(frozen=True)
class UtilityTable:
    """Expected utility for every (observed b, awarded k); rows are information sets."""

    values: np.ndarray

    def best_responses(self):
        return np.array([_argmax_low(row) for row in self.values])


def _argmax_low(values):
    values = np.asarray(values)
    return int(np.flatnonzero(values >= values.max() - TIE_TOL)[0])


def parse_info_set(info_set, n_rounds=3):
    """Accept an observed Blue count or, for three rounds, a name like 'BRR'."""
    if isinstance(info_set, str) and not info_set.isdigit():
        name = "".join(sorted(info_set.upper()))  # 'BRR' sorts to itself
        if n_rounds != 3 or name not in INFO_SETS_3:
            raise ValueError(f"unknown information set {info_set!r}")
        return INFO_SETS_3[name]
    return check_count(int(info_set), n_rounds, "info_set")


def _check_partisan(config):
    if config.partisan is None:
        raise ValueError("best responses need a partisan judge")


def expected_utility(b, k, config, mixing="joint"):
    """S * P(Blue wins) - E[backlash] for the partisan who saw b and awards k."""
    _check_partisan(config)
    p_blue = bout_dist(b, k, config, mixing).p_blue
    return config.favoritism * p_blue - expected_backlash(b, k, config)


def utility_table(config, mixing="joint"):
    n = config.n_rounds
    return UtilityTable(
        np.array(
            [[expected_utility(b, k, config, mixing) for k in range(n + 1)] for b in range(n + 1)]
        )
    )


def best_response(b, config, mixing="joint"):
    n = config.n_rounds
    check_count(b, n, "b")
    utils = [expected_utility(b, k, config, mixing) for k in range(n + 1)]
    return PartisanStrategy(_argmax_low(utils))


def best_response_table(config, mixing="joint"):
    """k chosen for every observed b; fair scoring when there is no partisan."""
    if config.partisan is None or config.favoritism == 0:
        return np.arange(config.n_rounds + 1)
    return utility_table(config, mixing).best_responses()


def critical_s_closed_form(alpha, rule, info_set):
    """Favouritism threshold for three rounds and three judges.

    Below the returned value the partisan scores fairly.  Majority judges
    uses the pooled fair-card model.
    """
    a = check_alpha(alpha)
    rule = ScoringRule.parse(rule)
    b = parse_info_set(info_set, 3)
    num = 1 - 2 * a
    if rule is ScoringRule.MAJORITY_JUDGES:
        if b == 1:
            poly = 0.5 * a**4 - a**3 + 0.875 * a**2 - 0.375 * a + 0.125
            s_hat = num / (192 * a * (1 - a) * (32 * a * (a - 1) * poly + 1) * poly)
        elif b == 0:
            poly = a**2 - a + 0.75
            s_hat = num / (
                48 * a**2 * (1 - a) ** 2 * (1 - 16 * a**2 * (1 - a) ** 2 * poly) * poly
            )
        else:
            raise ValueError(
                f"fair play optimal at {INFO_SET_NAMES_3[b]}; no threshold under majority judges"
            )
    else:
        if b == 2:
            s_hat = num / (12 * a**2 * (a**4 - 3 * a**3 + 4 * a**2 - 3 * a + 1))
        elif b == 1:
            s_hat = num / (
                6 * a * (-2 * a**5 + 6 * a**4 - 8 * a**3 + 6 * a**2 - 3 * a + 1)
            )
        elif b == 0:
            # deviation to BBB binds for small alpha, to BBR near 1/2
            to_bbb = num / (4 * a**2 * (13 * a**4 - 39 * a**3 + 45 * a**2 - 25 * a + 6))
            to_bbr = num / (6 * a**2 * (4 * a**4 - 12 * a**3 + 15 * a**2 - 10 * a + 3))
            s_hat = min(to_bbb, to_bbr)
        else:
            raise ValueError("fair play optimal at BBB; no threshold")
    return CriticalS(rule, b, a, s_hat, "closed-form")


def critical_s_numeric(alpha, rule, info_set, config=None, mixing="joint", xtol=1e-9):
    """Bisect on S for the indifference between fair scoring and the best deviation."""
    a = check_alpha(alpha)
    rule = ScoringRule.parse(rule)
    if config is None:
        config = BoutConfig(n_rounds=3, n_judges=3)
    config = config.replace(alpha=a, rule=rule, favoritism=0.0)
    _check_partisan(config)
    n = config.n_rounds
    b = parse_info_set(info_set, n)
    p_blue = np.array([bout_dist(b, k, config, mixing).p_blue for k in range(n + 1)])
    cost = np.array([expected_backlash(b, k, config) for k in range(n + 1)])
    others = np.arange(n + 1) != b

    def gain(s):
        return np.max((s * p_blue - cost)[others]) - (s * p_blue[b] - cost[b])

    hi = 1.0
    while gain(hi) <= 0:
        hi *= 2
        if hi > 1e12:
            name = INFO_SET_NAMES_3.get(b, str(b)) if n == 3 else str(b)
            raise ValueError(
                f"fair play optimal at {name}; no threshold "
                f"(no sign change for S in [0, {hi:g}], rule={rule.value}, alpha={a})"
            )
    s_hat = bisect(gain, 0.0, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
    return CriticalS(rule, b, a, s_hat, "numeric")


def symbolic_utility_table(alpha, rule, c_values=None):
    """Three-round utility table in the symbolic form, with S factored out.

    Returns (win, cost) arrays so that utility = S * win - cost.  ``c_values``
    maps b to the pooled fair-card probability and is required for majority
    judges.
    """
    a = alpha
    cost = np.empty((4, 4))
    win = np.empty((4, 4))
    for b in range(4):
        for k in range(4):
            wrong = abs(k - b)
            cost[b, k] = (wrong * (1 - a) + (3 - wrong) * a) / 3
    if ScoringRule.parse(rule) is ScoringRule.MAJORITY_JUDGES:
        for b in range(4):
            c = c_values[b]
            for k in range(4):
                win[b, k] = 1 - (1 - c) ** 2 if k >= 2 else c**2
    else:
        q = {"1": 1 - a * (1 - a), "2": 3 * a - 3 * a**2, "3": 1 - 3 * a + 3 * a**2, "4": a * (1 - a)}
        for b in range(4):
            for k in range(4):
                bb, rb, br, rr = min(b, k), max(k - b, 0), max(b - k, 0), 3 - max(b, k)
                probs = [q["1"]] * bb + [q["2"]] * rb + [q["3"]] * br + [q["4"]] * rr
                win[b, k] = f_two_of_three(*probs)
    return win, cost


def win_curve(config, b_true, partisan_noise=True):
    """P(Blue wins) for each forced award k = 0..N given b_true truly Blue rounds."""
    n = config.n_rounds
    check_count(b_true, n, "b_true")
    _check_partisan(config)
    return np.array(
        [outcome_given_truth(b_true, config, k, partisan_noise).p_blue for k in range(n + 1)]
    )
