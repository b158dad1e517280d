"""Seeded, order-independent Monte Carlo campaigns.

Trials are cut into fixed-size blocks.  Block ``i`` of condition ``c`` draws
from a Philox stream keyed by ``(master_seed, c, i)``, so the tallies depend
only on the campaign spec and the seed, never on how many workers run the blocks or in
which order they finish.  Partial tallies are merged by integer addition.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
import math
import os

import numpy as np

from ringside.exact import outcome_table, robbery_rates
from ringside.model import BLUE, DRAW, RED, BoutConfig, canonical_award, outcome_codes
from ringside.strategy import best_response_table

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1 << 15
PRIOR_CONDITION = -1
CONDITIONINGS = ("per-b_true", "binomial-prior")


@dataclass(frozen=True)
class CampaignSpec:
    config: BoutConfig
    trials_per_condition: int
    master_seed: int = 0
    conditioning: str = "per-b_true"
    b_true_values: tuple = None
    mixing: str = "joint"

    def __post_init__(self):
        if self.trials_per_condition < 1:
            raise ValueError("trials_per_condition must be >= 1")
        if self.conditioning not in CONDITIONINGS:
            raise ValueError(f"conditioning must be one of {CONDITIONINGS}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.b_true_values is not None:
            vals = tuple(int(v) for v in self.b_true_values)
            if any(not 0 <= v <= self.config.n_rounds for v in vals):
                raise ValueError("b_true values must lie in [0, N]")
            object.__setattr__(self, "b_true_values", vals)

    def conditions(self):
        if self.conditioning == "binomial-prior":
            return (PRIOR_CONDITION,)
        if self.b_true_values is not None:
            return self.b_true_values
        return tuple(range(self.config.n_rounds + 1))


@dataclass
class TallyTable:
    """Per-b_true counts of trials, outcomes and correct verdicts."""

    n_rounds: int
    trials: np.ndarray = field(default=None)
    outcomes: np.ndarray = field(default=None)  # columns: BlueWin, RedWin, Draw
    correct: np.ndarray = field(default=None)

    def __post_init__(self):
        size = self.n_rounds + 1
        if self.trials is None:
            self.trials = np.zeros(size, dtype=np.int64)
        if self.outcomes is None:
            self.outcomes = np.zeros((size, 3), dtype=np.int64)
        if self.correct is None:
            self.correct = np.zeros(size, dtype=np.int64)

    def merge(self, other):
        self.trials += other.trials
        self.outcomes += other.outcomes
        self.correct += other.correct
        return self

    def rows(self):
        return [t for t in range(self.n_rounds + 1) if self.trials[t] > 0]

    def probabilities(self):
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.outcomes / self.trials[:, None]

    def correct_probability(self):
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.correct / self.trials

    def standard_errors(self):
        p = self.probabilities()
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.sqrt(p * (1 - p) / self.trials[:, None])


def block_rng(master_seed, condition, block):
    key = (int(condition) + 1, int(block))  # shift so the prior condition keys as 0
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))


def _sample_truth(rng, size, n_rounds, condition):
    if condition == PRIOR_CONDITION:
        return rng.random((size, n_rounds)) < 0.5
    # uniform arrangement of exactly `condition` Blue rounds
    ranks = np.argsort(np.argsort(rng.random((size, n_rounds)), axis=1), axis=1)
    return ranks < condition


def simulate_block(config, policy_table, condition, size, rng):
    """Run ``size`` trials and return their partial TallyTable."""
    n = config.n_rounds
    tau = _sample_truth(rng, size, n, condition)
    flips = rng.random((size, n, config.n_judges)) < config.alpha
    scores = tau[:, :, None] ^ flips
    p = config.partisan
    if p is not None:
        observed = scores[:, :, p]
        scores[:, :, p] = canonical_award(observed, policy_table[observed.sum(axis=1)])
    codes = outcome_codes(scores, config.rule)
    b_true = tau.sum(axis=1)
    verdict = np.where(2 * b_true > n, BLUE, np.where(2 * b_true < n, RED, DRAW))
    tally = TallyTable(n)
    tally.trials += np.bincount(b_true, minlength=n + 1)
    for code in (BLUE, RED, DRAW):
        tally.outcomes[:, code] += np.bincount(b_true[codes == code], minlength=n + 1)
    tally.correct += np.bincount(b_true[codes == verdict], minlength=n + 1)
    return tally


def default_workers():
    cap = os.environ.get("RINGSIDE_THREADS")
    workers = os.cpu_count() or 1
    if cap:
        workers = min(workers, max(1, int(cap)))
    return workers


def run_campaign(spec, workers=None, policy_table=None):
    """Simulate every condition of ``spec`` and return the merged TallyTable."""
    config = spec.config
    if policy_table is None:
        policy_table = best_response_table(config, spec.mixing)
    policy_table = np.asarray(policy_table)
    jobs = []
    for condition in spec.conditions():
        n_blocks = math.ceil(spec.trials_per_condition / BLOCK_SIZE)
        for block in range(n_blocks):
            size = min(BLOCK_SIZE, spec.trials_per_condition - block * BLOCK_SIZE)
            jobs.append((condition, block, size))

    def run(job):
        condition, block, size = job
        return simulate_block(
            config, policy_table, condition, size, block_rng(spec.master_seed, condition, block)
        )

    workers = workers or default_workers()
    logger.debug("running %d blocks on %d workers", len(jobs), workers)
    total = TallyTable(config.n_rounds)
    if workers == 1:
        for job in jobs:
            total.merge(run(job))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(run, jobs):
                total.merge(part)
    return total


def robbery_ratio(spec, workers=None, tally=None):
    """Monte Carlo robbery rates under the fair-coin prior.

    Returns (rate_blue / rate_red, rate_blue, rate_red).  The ratio is
    infinite when no Red robbery was observed.
    """
    if spec.conditioning != "binomial-prior":
        raise ValueError("robbery_ratio needs a binomial-prior campaign")
    if tally is None:
        tally = run_campaign(spec, workers)
    n = tally.n_rounds
    total = tally.trials.sum()
    blue = sum(tally.outcomes[t, BLUE] for t in range(n + 1) if 2 * t < n) / total
    red = sum(tally.outcomes[t, RED] for t in range(n + 1) if 2 * t > n) / total
    if red == 0:
        logger.warning("no Red robberies in %d trials; ratio reported as infinite", total)
        return math.inf, blue, red
    return blue / red, blue, red


def exact_robbery_ratio(config, mixing="joint"):
    table = outcome_table(config, best_response_table(config, mixing))
    blue, red = robbery_rates(table)
    return (blue / red if red > 0 else math.inf), blue, red


@dataclass
class CrossCheckCell:
    b_true: int
    outcome: str
    simulated: float
    exact: float
    se: float

    @property
    def z(self):
        if self.se == 0:
            return 0.0 if abs(self.simulated - self.exact) < 1e-12 else math.inf
        return (self.simulated - self.exact) / self.se


@dataclass
class CrossCheckReport:
    cells: list
    threshold: float = 4.0

    @property
    def flagged(self):
        return [c for c in self.cells if abs(c.z) > self.threshold]

    @property
    def ok(self):
        return not self.flagged


def exact_cross_check(spec, tally=None, workers=None, threshold=4.0):
    """Compare every simulated outcome frequency with its exact probability.

    The standard error of each cell is computed from the exact probability,
    sqrt(p (1 - p) / n); cells further than ``threshold`` standard errors
    from the exact value are flagged.
    """
    config = spec.config
    if tally is None:
        tally = run_campaign(spec, workers)
    policy = best_response_table(config, spec.mixing)
    table = outcome_table(config, policy)
    names = ("BlueWin", "RedWin", "Draw")
    cells = []
    for t in tally.rows():
        n = tally.trials[t]
        for i, name in enumerate(names):
            p = table[t, i]
            se = math.sqrt(max(p * (1 - p), 0.0) / n)
            cells.append(CrossCheckCell(t, name, tally.outcomes[t, i] / n, p, se))
    return CrossCheckReport(cells, threshold)

