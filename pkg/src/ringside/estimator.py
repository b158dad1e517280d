"""Scikit-learn style front end to the bout model."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ringside._validation import as_corner_array, check_count, check_signals
from ringside.exact import correct_probabilities, outcome_table, truth_verdict
from ringside.model import BoutConfig, Outcome, outcome_codes, score_bouts
from ringside.strategy import best_response_table, utility_table

_NAMES = np.array([o.value for o in Outcome])


class PartisanBoutModel(BaseEstimator):
    """Judged bouts with noisy judges and at most one partisan for Blue.

    ``fit`` solves the partisan's best response for every information set.
    Afterwards the model maps signal matrices to scorecards (``transform``)
    and bout outcomes (``predict``), and gives exact outcome probabilities for
    a true Blue-round count (``outcome_proba``).

    Parameters
    ----------
    alpha : float
        Probability that a judge's signal for a round is wrong.
    favoritism : float
        Partisan's utility S from a Blue win.
    n_rounds, n_judges : int
        Bout length and (odd) panel size.
    n_partisans : {0, 1}
        The partisan, if any, sits at judge index 0.
    rule : {"majority-judges", "majority-rounds"}
    mixing : {"joint", "pooled"}
        Fair-card model used for majority-judges best responses.
    """

    def __init__(
        self,
        alpha=0.1,
        favoritism=0.8,
        n_rounds=12,
        n_judges=3,
        n_partisans=1,
        rule="majority-judges",
        mixing="joint",
    ):
        self.alpha = alpha
        self.favoritism = favoritism
        self.n_rounds = n_rounds
        self.n_judges = n_judges
        self.n_partisans = n_partisans
        self.rule = rule
        self.mixing = mixing

    def _make_config(self):
        check_count(self.n_partisans, 1, "partisans")
        return BoutConfig(
            n_rounds=self.n_rounds,
            n_judges=self.n_judges,
            alpha=self.alpha,
            favoritism=self.favoritism,
            partisan_indices=(0,) if self.n_partisans else (),
            rule=self.rule,
        )

    def fit(self, X=None, y=None):
        """Solve the partisan's best responses; X and y are ignored."""
        self.config_ = self._make_config()
        self.best_response_ = best_response_table(self.config_, self.mixing)
        if self.config_.partisan is not None:
            self.utility_table_ = utility_table(self.config_, self.mixing).values
        return self

    def _check_fitted(self):
        if not hasattr(self, "config_"):
            raise NotFittedError("call fit before using this PartisanBoutModel")

    def transform(self, X):
        """Scorecards (True = Blue) for signal matrices shaped (n_bouts, N, J)."""
        self._check_fitted()
        X = check_signals(X, self.config_.n_rounds, self.config_.n_judges)
        return score_bouts(X, self.config_, self.best_response_)

    def predict(self, X):
        codes = outcome_codes(self.transform(X), self.config_.rule)
        return _NAMES[codes]

    def score(self, X, y):
        """Fraction of bouts whose outcome matches the verdict of the true rounds.

        ``y`` holds the true round winners, shaped (n_bouts, N).
        """
        y = as_corner_array(y)
        if y.ndim == 1:
            y = y[None]
        n = self.config_.n_rounds if hasattr(self, "config_") else self.n_rounds
        truth = _NAMES[[truth_verdict(int(t), n) for t in y.sum(axis=1)]]
        return float(np.mean(self.predict(X) == truth))

    def outcome_proba(self, b_true):
        """Exact (p_blue, p_red, p_draw) rows for each requested true Blue-round count."""
        self._check_fitted()
        table = self.outcome_table()
        b_true = np.atleast_1d(np.asarray(b_true, dtype=int))
        if b_true.min() < 0 or b_true.max() > self.config_.n_rounds:
            raise ValueError("b_true must lie in [0, N]")
        return table[b_true]

    def outcome_table(self):
        self._check_fitted()
        if not hasattr(self, "outcome_table_"):
            self.outcome_table_ = outcome_table(self.config_, self.best_response_)
        return self.outcome_table_

    def correct_proba(self):
        return correct_probabilities(self.outcome_table())
