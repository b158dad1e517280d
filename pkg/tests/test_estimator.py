import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ringside import BoutConfig, PartisanBoutModel, sample_signals, sample_true_sequence
from ringside._validation import ConfigError
from ringside.exact import outcome_table
from ringside.strategy import best_response_table


def test_params_roundtrip():
    model = PartisanBoutModel(alpha=0.2, rule="majority-rounds")
    params = model.get_params()
    assert params["alpha"] == 0.2 and params["rule"] == "majority-rounds"
    twin = clone(model)
    assert twin.get_params() == params
    twin.set_params(favoritism=2.0)
    assert twin.favoritism == 2.0 and model.favoritism == 0.8


def test_unfitted():
    model = PartisanBoutModel()
    with pytest.raises(NotFittedError):
        model.transform(np.zeros((1, 12, 3), dtype=bool))
    with pytest.raises(NotFittedError):
        model.outcome_proba(6)


@pytest.mark.parametrize(
    "params",
    [{"alpha": 0.5}, {"n_judges": 4}, {"n_partisans": 2}, {"favoritism": -0.1}, {"rule": "points"}],
)
def test_invalid_params(params):
    with pytest.raises(ConfigError):
        PartisanBoutModel(**params).fit()


def test_fit_attributes():
    model = PartisanBoutModel().fit()
    assert model.best_response_.tolist() == [0, 1, 2, 3, 4, 7, 7, 7, 8, 9, 10, 11, 12]
    assert model.utility_table_.shape == (13, 13)
    fair = PartisanBoutModel(n_partisans=0).fit()
    assert fair.best_response_.tolist() == list(range(13))
    assert not hasattr(fair, "utility_table_")


def test_transform_predict_score():
    rng = np.random.default_rng(3)
    model = PartisanBoutModel(rule="majority-rounds").fit()
    config = model.config_
    taus = np.array([sample_true_sequence(config, rng) for _ in range(50)])
    X = np.array([sample_signals(t, config, rng) for t in taus])
    cards = model.transform(X)
    assert cards.shape == X.shape and cards.dtype == bool
    # fair judges copy their signals
    np.testing.assert_array_equal(cards[..., 1:], X[..., 1:])
    # the partisan never takes Blue rounds away
    assert np.all(cards[..., 0] >= X[..., 0])
    labels = model.predict(X)
    assert set(labels) <= {"BlueWin", "RedWin", "Draw"}
    assert 0.5 < model.score(X, taus) <= 1.0


def test_transform_shape_checked():
    model = PartisanBoutModel().fit()
    with pytest.raises(ValueError):
        model.transform(np.zeros((2, 11, 3), dtype=bool))


def test_outcome_proba_matches_engine():
    model = PartisanBoutModel(alpha=0.15, favoritism=1.5, n_rounds=4, n_judges=5).fit()
    config = BoutConfig(n_rounds=4, n_judges=5, alpha=0.15, favoritism=1.5)
    want = outcome_table(config, best_response_table(config))
    np.testing.assert_allclose(model.outcome_proba([0, 2, 4]), want[[0, 2, 4]], atol=1e-15)
    np.testing.assert_allclose(model.outcome_proba(2).sum(axis=1), 1.0)
    assert model.correct_proba().shape == (5,)
    with pytest.raises(ValueError):
        model.outcome_proba(5)
