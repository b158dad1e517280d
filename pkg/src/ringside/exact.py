"""Exact probability engine.

Everything here is a finite sum over binomial, hypergeometric or multinomial
terms; there is no sampling.  Two views are provided:

* the partisan's view, conditioned on the number ``b`` of Blue signals they
  observed (posterior over the true Blue-round count ``b_T``), used for best
  responses, and
* the truth view, conditioned on the true Blue-round count, used to compute
  the outcome tables that the simulations estimate.

Majority-judges probabilities from the partisan's view come in two flavours,
selected by ``mixing``.  ``"joint"`` treats the fair cards as independent only
given ``b_T`` and averages the outcome over the posterior; it is the exact
Bayesian quantity.  ``"pooled"`` first averages the card probabilities over the
posterior and then treats the fair cards as independent, which is the
simplification behind the symbolic three-round utility table and its
closed-form thresholds.
"""

from itertools import product
import math
from typing import NamedTuple

import numpy as np

from ringside._validation import check_alpha, check_count
from ringside.model import Corner, ScoringRule, as_policy

MIXINGS = ("joint", "pooled")


class OutcomeDist(NamedTuple):
    p_blue: float
    p_red: float
    p_draw: float


class CardProbTriple(NamedTuple):
    p_blue: float
    p_tie: float
    p_red: float


def binom_pmf(trials, p, k):
    if k < 0 or k > trials:
        return 0.0
    return math.comb(trials, k) * p**k * (1 - p) ** (trials - k)


def binom_tail(trials, p, k):
    """P(Y >= k) for Y ~ Binomial(trials, p)."""
    k = max(k, 0)
    if k > trials:
        return 0.0
    if k == 0:
        return 1.0
    return math.fsum(binom_pmf(trials, p, i) for i in range(k, trials + 1))


def binom_pmf_vector(trials, p):
    return np.array([binom_pmf(trials, p, k) for k in range(trials + 1)])


def hypergeom_pmf(population, successes, draws, k):
    if k < 0 or k > successes or draws - k < 0 or draws - k > population - successes:
        return 0.0
    return (
        math.comb(successes, k)
        * math.comb(population - successes, draws - k)
        / math.comb(population, draws)
    )


def _tail_split(pmf, n_rounds):
    """(P(total > N/2), P(total < N/2), P(total = N/2)) for a pmf over 0..N."""
    blue = math.fsum(pmf[k] for k in range(len(pmf)) if 2 * k > n_rounds)
    red = math.fsum(pmf[k] for k in range(len(pmf)) if 2 * k < n_rounds)
    tie = float(pmf[n_rounds // 2]) if n_rounds % 2 == 0 else 0.0
    return blue, red, tie


def q_fair_given_signal(alpha, observed):
    """Probability a fair judge scores the round Blue given the partisan's signal."""
    alpha = check_alpha(alpha)
    if Corner(observed) is Corner.B:
        return (1 - alpha) ** 2 + alpha**2
    return 2 * alpha * (1 - alpha)


def card_prob_given_true(b_true, config):
    n = config.n_rounds
    check_count(b_true, n, "b_T")
    a = config.alpha
    pmf = np.convolve(binom_pmf_vector(b_true, 1 - a), binom_pmf_vector(n - b_true, a))
    blue, red, tie = _tail_split(pmf, n)
    return CardProbTriple(blue, tie, red)


def observation_likelihood(b, b_true, config):
    """P(partisan sees ``b`` Blue signals | ``b_true`` rounds truly Blue)."""
    n, a = config.n_rounds, config.alpha
    check_count(b_true, n, "b_T")
    return math.fsum(
        binom_pmf(b_true, 1 - a, x) * binom_pmf(n - b_true, a, b - x)
        for x in range(b_true + 1)
    )


def posterior_true_rounds(b, config):
    """Posterior over b_T given b under the fair-coin Binomial(N, 1/2) prior."""
    n = config.n_rounds
    check_count(b, n, "b")
    weights = np.array(
        [binom_pmf(n, 0.5, t) * observation_likelihood(b, t, config) for t in range(n + 1)]
    )
    return weights / math.fsum(weights)


def c_given_b(b, config):
    """Probability that one fair card favours Blue, given the partisan's count b."""
    post = posterior_true_rounds(b, config)
    blue = [card_prob_given_true(t, config).p_blue for t in range(config.n_rounds + 1)]
    return math.fsum(w * p for w, p in zip(post, blue))


def _fair_round_blue(true_blue, partisan_blue, config):
    """P(round goes Blue | true winner, partisan vote) under the fair judges' noise."""
    j, a = config.n_judges, config.alpha
    need = (j + 1) // 2 - int(partisan_blue)
    return binom_tail(j - 1, 1 - a if true_blue else a, need)


def round_win_prob(observed, action, config):
    """P(Blue wins a round | partisan's signal and vote), averaged over the true winner."""
    a = config.alpha
    p_true_blue = 1 - a if Corner(observed) is Corner.B else a
    vote_blue = Corner(action) is Corner.B
    return p_true_blue * _fair_round_blue(True, vote_blue, config) + (
        1 - p_true_blue
    ) * _fair_round_blue(False, vote_blue, config)


def f_two_of_three(p1, p2, p3):
    return p1 * p2 * (1 - p3) + p1 * (1 - p2) * p3 + (1 - p1) * p2 * p3 + p1 * p2 * p3


def canonical_counts(b, k, n_rounds):
    """Round counts (obsB->B, obsR->B, obsB->R, obsR->R) of the canonical award."""
    return (min(b, k), max(k - b, 0), max(b - k, 0), n_rounds - max(b, k))


def _bernoulli_sum(groups, n_rounds):
    """Distribution of the number of Blue rounds for independent groups of (count, p)."""
    pmf = np.array([1.0])
    for count, p in groups:
        if count:
            pmf = np.convolve(pmf, binom_pmf_vector(count, p))
    return _tail_split(pmf, n_rounds)


def bout_dist_majority_rounds(counts, config):
    """Outcome distribution from the partisan's view under majority rounds.

    ``counts`` gives the number of rounds in each (observed, action) class in
    the order (obsB->B, obsR->B, obsB->R, obsR->R).
    """
    if sum(counts) != config.n_rounds or min(counts) < 0:
        raise ValueError(f"class counts {counts} must be nonnegative and sum to N")
    classes = [("B", "B"), ("R", "B"), ("B", "R"), ("R", "R")]
    groups = [(c, round_win_prob(o, d, config)) for c, (o, d) in zip(counts, classes)]
    blue, red, tie = _bernoulli_sum(groups, config.n_rounds)
    return OutcomeDist(blue, red, tie)


def _partisan_card(k, n_rounds):
    if 2 * k > n_rounds:
        return 0
    if 2 * k < n_rounds:
        return 2
    return 1


def _judges_vote(fair_triple, n_fair, partisan_card, n_judges):
    """Bout outcome distribution given i.i.d. fair cards and the partisan's card.

    Card categories are indexed 0 = Blue, 1 = Tie, 2 = Red; ``partisan_card``
    is None when every judge is fair.
    """
    pb, pt, pr = fair_triple
    blue_terms, red_terms = [], []
    for nb in range(n_fair + 1):
        for nt in range(n_fair - nb + 1):
            nr = n_fair - nb - nt
            w = (
                math.factorial(n_fair)
                // (math.factorial(nb) * math.factorial(nt) * math.factorial(nr))
                * pb**nb
                * pt**nt
                * pr**nr
            )
            blue_cards = nb + (partisan_card == 0)
            red_cards = nr + (partisan_card == 2)
            if 2 * blue_cards > n_judges:
                blue_terms.append(w)
            elif 2 * red_cards > n_judges:
                red_terms.append(w)
    blue, red = math.fsum(blue_terms), math.fsum(red_terms)
    return OutcomeDist(blue, red, max(0.0, 1.0 - blue - red))


def bout_dist_majority_judges(b, k, config, mixing="joint"):
    """Outcome distribution from the partisan's view under majority judges."""
    n = config.n_rounds
    check_count(b, n, "b")
    check_count(k, n, "k")
    if mixing not in MIXINGS:
        raise ValueError(f"mixing must be one of {MIXINGS}, got {mixing!r}")
    post = posterior_true_rounds(b, config)
    triples = [card_prob_given_true(t, config) for t in range(n + 1)]
    pcard = _partisan_card(k, n)
    n_fair = config.n_judges - 1
    if mixing == "pooled":
        pooled = [math.fsum(w * tr[i] for w, tr in zip(post, triples)) for i in range(3)]
        return _judges_vote(pooled, n_fair, pcard, config.n_judges)
    dists = [_judges_vote(tr, n_fair, pcard, config.n_judges) for tr in triples]
    blue = math.fsum(w * d.p_blue for w, d in zip(post, dists))
    red = math.fsum(w * d.p_red for w, d in zip(post, dists))
    return OutcomeDist(blue, red, max(0.0, 1.0 - blue - red))


def bout_dist(b, k, config, mixing="joint"):
    """Partisan's-view outcome distribution under ``config.rule``."""
    if config.rule is ScoringRule.MAJORITY_JUDGES:
        return bout_dist_majority_judges(b, k, config, mixing)
    check_count(b, config.n_rounds, "b")
    check_count(k, config.n_rounds, "k")
    return bout_dist_majority_rounds(canonical_counts(b, k, config.n_rounds), config)


def expected_backlash(b, k, config):
    n, a = config.n_rounds, config.alpha
    check_count(b, n, "b")
    check_count(k, n, "k")
    bb, rb, br, rr = canonical_counts(b, k, n)
    return (bb * a + rb * (1 - a) + br * (1 - a) + rr * a) / n


def outcome_given_truth(b_true, config, policy=None, partisan_noise=True):
    """Exact outcome distribution given the true number of Blue rounds.

    Fair judges score their noisy signals.  The partisan (if any) awards
    ``policy[b]`` rounds to Blue after observing ``b`` Blue signals, with the
    true Blue rounds in uniformly random positions.  ``partisan_noise=False``
    lets the partisan observe the true winners exactly.
    """
    n, j, a = config.n_rounds, config.n_judges, config.alpha
    check_count(b_true, n, "b_true")
    if config.partisan is None:
        if config.rule is ScoringRule.MAJORITY_JUDGES:
            return _judges_vote(card_prob_given_true(b_true, config), j, None, j)
        p_blue_round = binom_tail(j, 1 - a, (j + 1) // 2)
        blue, red, tie = _bernoulli_sum(
            [(b_true, p_blue_round), (n - b_true, 1 - p_blue_round)], n
        )
        return OutcomeDist(blue, red, tie)

    table = as_policy(policy, n)
    if partisan_noise:
        splits = [
            (x, y, binom_pmf(b_true, 1 - a, x) * binom_pmf(n - b_true, a, y))
            for x, y in product(range(b_true + 1), range(n - b_true + 1))
        ]
    else:
        splits = [(b_true, 0, 1.0)]

    if config.rule is ScoringRule.MAJORITY_JUDGES:
        fair = card_prob_given_true(b_true, config)
        by_card = {}
        for x, y, w in splits:
            card = _partisan_card(int(table[x + y]), n)
            by_card[card] = by_card.get(card, []) + [w]
        dists = {c: _judges_vote(fair, j - 1, c, j) for c in by_card}
        terms = [(math.fsum(ws), dists[c]) for c, ws in by_card.items()]
        return OutcomeDist(
            *(math.fsum(w * d[i] for w, d in terms) for i in range(3))
        )

    # (true winner, partisan vote) -> P(round goes Blue)
    r_bb = _fair_round_blue(True, True, config)
    r_br = _fair_round_blue(True, False, config)
    r_rb = _fair_round_blue(False, True, config)
    r_rr = _fair_round_blue(False, False, config)
    acc = [[], [], []]
    for x, y, w in splits:
        b = x + y
        k = int(table[b])
        if k >= b:
            # k - b extra Blue awards land on Red-signalled rounds, b_true - x of which are truly Blue
            m, pool, pool_blue = k - b, n - b, b_true - x
        else:
            # b - k Blue-signalled rounds are withheld, x of which are truly Blue
            m, pool, pool_blue = b - k, b, x
        for f in range(m + 1):
            h = hypergeom_pmf(pool, pool_blue, m, f)
            if h == 0.0:
                continue
            if k >= b:
                counts = (x + f, b_true - x - f, y + m - f, n - b_true - y - (m - f))
            else:
                counts = (x - f, b_true - x + f, y - (m - f), n - b_true - y + (m - f))
            dist = _bernoulli_sum(zip(counts, (r_bb, r_br, r_rb, r_rr)), n)
            for i in range(3):
                acc[i].append(w * h * dist[i])
    return OutcomeDist(*(math.fsum(t) for t in acc))


def outcome_table(config, policy=None, partisan_noise=True):
    """Exact (N+1, 3) table of (p_blue, p_red, p_draw) for every b_true."""
    return np.array(
        [
            outcome_given_truth(t, config, policy, partisan_noise)
            for t in range(config.n_rounds + 1)
        ]
    )


def truth_verdict(b_true, n_rounds):
    """Outcome code implied by the true rounds: 0 Blue, 1 Red, 2 Draw."""
    if 2 * b_true > n_rounds:
        return 0
    if 2 * b_true < n_rounds:
        return 1
    return 2


def correct_probabilities(table):
    n = len(table) - 1
    return np.array([table[t, truth_verdict(t, n)] for t in range(n + 1)])


def robbery_rates(table):
    """Prior-weighted robbery rates (Blue, Red) from an exact outcome table.

    b_true is Binomial(N, 1/2); a Blue robbery is a Blue win when Red truly
    won a strict majority of rounds, and vice versa.
    """
    n = len(table) - 1
    prior = binom_pmf_vector(n, 0.5)
    blue = math.fsum(prior[t] * table[t, 0] for t in range(n + 1) if 2 * t < n)
    red = math.fsum(prior[t] * table[t, 1] for t in range(n + 1) if 2 * t > n)
    return blue, red
