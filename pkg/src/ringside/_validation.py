"""Input validation helpers shared by the library, the estimator and the CLI."""

import numbers

import numpy as np


class ConfigError(ValueError):
    """Raised when a bout configuration violates one of its invariants."""


def check_alpha(alpha):
    if not isinstance(alpha, numbers.Real) or not (0.0 < float(alpha) < 0.5):
        raise ConfigError(f"alpha must lie in (0, 0.5), got {alpha!r}")
    return float(alpha)


def check_rounds(n_rounds):
    if isinstance(n_rounds, bool) or not isinstance(n_rounds, numbers.Integral) or n_rounds < 1:
        raise ConfigError(f"rounds must be an integer >= 1, got {n_rounds!r}")
    return int(n_rounds)


def check_judges(n_judges):
    if isinstance(n_judges, bool) or not isinstance(n_judges, numbers.Integral):
        raise ConfigError(f"judges must be an integer, got {n_judges!r}")
    if n_judges < 3 or n_judges % 2 == 0:
        raise ConfigError(f"judges must be an odd integer >= 3, got {n_judges!r}")
    return int(n_judges)


def check_favoritism(s):
    if not isinstance(s, numbers.Real) or not np.isfinite(s) or s < 0:
        raise ConfigError(f"s must be a finite nonnegative number, got {s!r}")
    return float(s)


def check_count(value, upper, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or not 0 <= value <= upper:
        raise ConfigError(f"{name} must be an integer in [0, {upper}], got {value!r}")
    return int(value)


def as_corner_array(values):
    """Convert corners given as 'B'/'R' strings, Corner members or booleans to a bool array.

    True marks a Blue corner.
    """
    if isinstance(values, str):
        values = list(values)
    arr = np.asarray(values)
    if arr.dtype == bool:
        return arr
    if arr.dtype.kind in "iu":
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("integer corner arrays must contain only 0 and 1")
        return arr.astype(bool)
    flat = [str(getattr(v, "value", v)).upper() for v in arr.ravel()]
    bad = sorted(set(flat) - {"B", "R"})
    if bad:
        raise ValueError(f"corners must be 'B' or 'R', got {bad}")
    return np.array([v == "B" for v in flat], dtype=bool).reshape(arr.shape)


def check_signals(X, n_rounds, n_judges):
    """Validate a stack of signal matrices shaped (n_bouts, n_rounds, n_judges)."""
    X = as_corner_array(X)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3 or X.shape[1:] != (n_rounds, n_judges):
        raise ValueError(
            f"expected signals shaped (n_bouts, {n_rounds}, {n_judges}), got {X.shape}"
        )
    return X
