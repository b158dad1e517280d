"""Named experiment configurations.

``curve_b_true`` is the true Blue-round count used by the ``curve``
subcommand when ``--b-true`` is not given.
"""

BENCHMARK = {
    "alpha": 0.1,
    "s": 0.8,
    "rounds": 12,
    "judges": 3,
    "partisans": 1,
    "rule": "both",
    "trials": 100_000,
    "seed": 0,
    "curve_b_true": 6,
}

PRESETS = {
    "benchmark": {},
    "high-disagreement": {"alpha": 0.2},
    "high-favoritism": {"s": 1.0},
    "womens-pro": {"rounds": 10, "judges": 3, "curve_b_true": 5},
    "mens-olympic": {"rounds": 3, "judges": 5, "curve_b_true": 1},
    "womens-olympic": {"rounds": 4, "judges": 5, "curve_b_true": 2},
    "all-fair": {"partisans": 0},
}


def resolve(name):
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return {**BENCHMARK, **PRESETS[name]}
