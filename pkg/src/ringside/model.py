"""Bout model: corners, scorecards, the two aggregation rules and a brute-force oracle.

Corners are stored as boolean arrays throughout, ``True`` meaning Blue.  A
scorecard set is an ``(N, J)`` array: one row per round, one column per judge.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations
import math

import numpy as np

from ringside._validation import (
    ConfigError,
    as_corner_array,
    check_alpha,
    check_favoritism,
    check_judges,
    check_rounds,
)

# Outcome codes used by the vectorised paths; they index OutcomeDist fields.
BLUE, RED, DRAW = 0, 1, 2

MAX_ENUMERATION_BITS = 20
MAX_FLIP_PAIR_CELLS = 25


class Corner(str, Enum):
    B = "B"
    R = "R"


class Outcome(str, Enum):
    BLUE_WIN = "BlueWin"
    RED_WIN = "RedWin"
    DRAW = "Draw"


class CardResult(str, Enum):
    BLUE = "Blue"
    RED = "Red"
    TIE = "Tie"


class ScoringRule(str, Enum):
    MAJORITY_JUDGES = "majority-judges"
    MAJORITY_ROUNDS = "majority-rounds"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for rule in cls:
            if key in (rule.value, rule.name.lower().replace("_", "-")):
                return rule
        raise ConfigError(
            f"rule must be one of {[r.value for r in cls]}, got {value!r}"
        )


_OUTCOMES = (Outcome.BLUE_WIN, Outcome.RED_WIN, Outcome.DRAW)


@dataclass(frozen=True)
class JudgeProfile:
    """Utility weights of one judge: S for a Blue win, G for a Red win."""

    S: float = 0.0
    G: float = 0.0

    def __post_init__(self):
        if self.S < 0 or self.G < 0:
            raise ConfigError("judge utilities S and G must be nonnegative")

    @property
    def is_fair(self):
        return self.S == 0 and self.G == 0


@dataclass(frozen=True)
class BoutConfig:
    """Full parameterisation of one bout experiment.

    Judges are indexed from 0.  At most one judge may be partisan; that judge
    favours Blue with utility ``favoritism`` (S) and has G = 0.
    """

    n_rounds: int = 12
    n_judges: int = 3
    alpha: float = 0.1
    favoritism: float = 0.8
    partisan_indices: tuple = (0,)
    rule: ScoringRule = ScoringRule.MAJORITY_JUDGES
    profiles: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        check_rounds(self.n_rounds)
        check_judges(self.n_judges)
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "favoritism", check_favoritism(self.favoritism))
        object.__setattr__(self, "rule", ScoringRule.parse(self.rule))
        idx = tuple(sorted({int(i) for i in self.partisan_indices}))
        if any(i < 0 or i >= self.n_judges for i in idx):
            raise ConfigError(
                f"partisan indices must lie in [0, {self.n_judges - 1}], got {idx}"
            )
        if len(idx) > 1:
            raise ConfigError("partisans must be 0 or 1; colluding partisans are not modelled")
        object.__setattr__(self, "partisan_indices", idx)
        object.__setattr__(
            self,
            "profiles",
            tuple(
                JudgeProfile(S=self.favoritism) if j in idx else JudgeProfile()
                for j in range(self.n_judges)
            ),
        )

    @property
    def n_partisans(self):
        return len(self.partisan_indices)

    @property
    def partisan(self):
        """Index of the partisan judge, or None when every judge is fair."""
        return self.partisan_indices[0] if self.partisan_indices else None

    def replace(self, **changes):
        return replace(self, **changes)


def sample_true_sequence(config, rng, b_true=None):
    """Draw the true round winners.

    Each round is Blue with probability 1/2, or, when ``b_true`` is given, the
    sequence is uniform over arrangements with exactly ``b_true`` Blue rounds.
    """
    n = config.n_rounds
    if b_true is None:
        return rng.random(n) < 0.5
    tau = np.zeros(n, dtype=bool)
    tau[rng.permutation(n)[:b_true]] = True
    return tau


def sample_signals(tau, config, rng):
    tau = as_corner_array(tau)
    if tau.shape != (config.n_rounds,):
        raise ValueError(f"tau must have length {config.n_rounds}")
    flips = rng.random((config.n_rounds, config.n_judges)) < config.alpha
    return tau[:, None] ^ flips


def backlash(card, tau):
    """Fraction of rounds on a card that contradict the true winners."""
    card, tau = as_corner_array(card), as_corner_array(tau)
    if card.shape != tau.shape:
        raise ValueError(f"card length {card.shape} does not match tau length {tau.shape}")
    return np.count_nonzero(card != tau) / tau.size


def round_winner(votes):
    votes = as_corner_array(votes)
    if votes.size % 2 == 0:
        raise ValueError("round winner needs an odd number of judges")
    return Corner.B if 2 * np.count_nonzero(votes) > votes.size else Corner.R


def card_result(card):
    card = as_corner_array(card)
    blue = np.count_nonzero(card)
    if 2 * blue > card.size:
        return CardResult.BLUE
    if 2 * blue < card.size:
        return CardResult.RED
    return CardResult.TIE


def outcome_codes(scores, rule):
    """Vectorised bout outcomes for score arrays shaped (..., N, J)."""
    scores = np.asarray(scores, dtype=bool)
    n, j = scores.shape[-2:]
    if ScoringRule.parse(rule) is ScoringRule.MAJORITY_JUDGES:
        blue_rounds = scores.sum(axis=-2)
        blue_cards = np.count_nonzero(2 * blue_rounds > n, axis=-1)
        red_cards = np.count_nonzero(2 * blue_rounds < n, axis=-1)
        blue_win, red_win = 2 * blue_cards > j, 2 * red_cards > j
    else:
        round_blue = 2 * scores.sum(axis=-1) > j
        total = round_blue.sum(axis=-1)
        blue_win, red_win = 2 * total > n, 2 * total < n
    return np.where(blue_win, BLUE, np.where(red_win, RED, DRAW))


def bout_outcome(scores, rule):
    scores = as_corner_array(scores)
    if scores.ndim != 2:
        raise ValueError("scores must be an (N, J) matrix")
    if scores.shape[1] % 2 == 0:
        raise ValueError("the judge panel must be odd")
    return _OUTCOMES[int(outcome_codes(scores, rule))]


def canonical_award(observed, k):
    """Partisan scorecard awarding exactly ``k`` rounds to Blue.

    Blue-signalled rounds are awarded first.  Extra Blue awards go to the
    earliest Red-signalled rounds; withheld ones are taken from the earliest
    Blue-signalled rounds.  Broadcasts over leading axes of ``observed``.
    """
    observed = np.asarray(observed, dtype=bool)
    extra = (np.asarray(k) - observed.sum(axis=-1))[..., None]
    rank_blue = np.cumsum(observed, axis=-1)
    rank_red = np.cumsum(~observed, axis=-1)
    return np.where(observed, rank_blue > -extra, rank_red <= extra)


def as_policy(policy, n_rounds):
    """Normalise a partisan policy to a length-(N+1) table of k per observed b.

    Accepts None (fair scoring), an int (forced k), an object with a
    ``k_awarded`` attribute, or a sequence indexed by b.
    """
    if policy is None:
        return np.arange(n_rounds + 1)
    k = getattr(policy, "k_awarded", policy)
    if np.ndim(k) == 0:
        k = int(k)
        if not 0 <= k <= n_rounds:
            raise ValueError(f"k must lie in [0, {n_rounds}], got {k}")
        return np.full(n_rounds + 1, k)
    table = np.asarray(k, dtype=int)
    if table.shape != (n_rounds + 1,) or table.min() < 0 or table.max() > n_rounds:
        raise ValueError(f"policy table must hold N+1 values in [0, {n_rounds}]")
    return table


def score_bouts(signals, config, policy=None):
    """Scorecards for a stack of signal matrices (..., N, J).

    Fair judges copy their signals; the partisan, if any, awards k = policy[b]
    rounds to Blue under the canonical flip order.
    """
    scores = np.array(signals, dtype=bool, copy=True)
    p = config.partisan
    if p is not None:
        table = as_policy(policy, config.n_rounds)
        observed = scores[..., p]
        scores[..., p] = canonical_award(observed, table[observed.sum(axis=-1)])
    return scores


def count_result_flipping_pairs(tau, rule, n_judges=3):
    """Count unordered cell pairs whose joint flip changes the all-fair result.

    The baseline has every signal equal to the true round winner.
    """
    tau = as_corner_array(tau)
    n = tau.size
    check_judges(n_judges)
    if n * n_judges > MAX_FLIP_PAIR_CELLS:
        raise ValueError(
            f"instance too large: {n}x{n_judges} cells exceeds {MAX_FLIP_PAIR_CELLS}"
        )
    base = np.repeat(tau[:, None], n_judges, axis=1)
    baseline = outcome_codes(base, rule)
    cells = [(t, j) for t in range(n) for j in range(n_judges)]
    count = 0
    for (t1, j1), (t2, j2) in combinations(cells, 2):
        trial = base.copy()
        trial[t1, j1] ^= True
        trial[t2, j2] ^= True
        count += int(outcome_codes(trial, rule) != baseline)
    return count


def _all_bit_patterns(n_bits):
    codes = np.arange(1 << n_bits, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n_bits)) & 1).astype(bool)


def _flip_weights(n_flips, n_cells, alpha):
    per_count = np.array(
        [alpha**f * (1 - alpha) ** (n_cells - f) for f in range(n_cells + 1)]
    )
    return per_count[n_flips]


def _dist_from_codes(codes, weights):
    from ringside.exact import OutcomeDist

    return OutcomeDist(*(math.fsum(weights[codes == c]) for c in (BLUE, RED, DRAW)))


def enumerate_exact(config, policy, tau):
    """Outcome distribution for a fixed true sequence by summing over every signal matrix."""
    tau = as_corner_array(tau)
    n, j = config.n_rounds, config.n_judges
    if tau.shape != (n,):
        raise ValueError(f"tau must have length {n}")
    if n * j > MAX_ENUMERATION_BITS:
        raise ValueError(
            f"instance too large for enumeration: N*J = {n * j} > {MAX_ENUMERATION_BITS}"
        )
    flips = _all_bit_patterns(n * j).reshape(-1, n, j)
    signals = tau[None, :, None] ^ flips
    codes = outcome_codes(score_bouts(signals, config, policy), config.rule)
    weights = _flip_weights(flips.reshape(len(flips), -1).sum(axis=1), n * j, config.alpha)
    return _dist_from_codes(codes, weights)


def enumerate_given_observation(config, b, k):
    """Outcome distribution given the partisan saw ``b`` Blue signals and awards ``k``.

    Enumerates every true sequence (fair-coin prior) jointly with every signal
    matrix and conditions on the partisan's Blue-signal count.
    """
    n, j = config.n_rounds, config.n_judges
    p = config.partisan
    if p is None:
        raise ValueError("conditioning on an observation needs a partisan judge")
    if n * j + n > MAX_ENUMERATION_BITS:
        raise ValueError(
            f"instance too large for enumeration: N*J + N = {n * j + n} > {MAX_ENUMERATION_BITS}"
        )
    bits = _all_bit_patterns(n + n * j)
    tau, flips = bits[:, :n], bits[:, n:].reshape(-1, n, j)
    signals = tau[:, :, None] ^ flips
    keep = signals[:, :, p].sum(axis=1) == b
    signals, flips = signals[keep], flips[keep]
    scores = signals.copy()
    scores[:, :, p] = canonical_award(signals[:, :, p], k)
    codes = outcome_codes(scores, config.rule)
    weights = _flip_weights(flips.reshape(len(flips), -1).sum(axis=1), n * j, config.alpha)
    total = math.fsum(weights)
    dist = _dist_from_codes(codes, weights)
    return type(dist)(*(x / total for x in dist))
