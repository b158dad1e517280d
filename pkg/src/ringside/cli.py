"""Command-line interface.

Settings are resolved in order of precedence: command-line flags, then keys
of a JSON ``--config`` file, then the ``--preset`` (default ``benchmark``;
``critical-s`` without a preset defaults to three rounds and three judges).
Exit codes: 0 success, 2 invalid configuration, 3 numeric failure.
"""

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from ringside import presets
from ringside._validation import check_count
from ringside.exact import correct_probabilities, outcome_table
from ringside.model import MAX_FLIP_PAIR_CELLS, BoutConfig, ScoringRule, count_result_flipping_pairs
from ringside.montecarlo import CampaignSpec, exact_robbery_ratio, run_campaign
from ringside.strategy import (
    INFO_SET_NAMES_3,
    best_response_table,
    critical_s_closed_form,
    critical_s_numeric,
    expected_utility,
    parse_info_set,
    win_curve,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

SETTING_KEYS = ("alpha", "s", "rounds", "judges", "partisans", "rule", "trials", "seed")


class CliError(Exception):
    def __init__(self, message, code=EXIT_CONFIG):
        super().__init__(message)
        self.code = code


def fmt(x):
    return f"{x:.10g}"


def fmt_p(x):
    return f"{x:.6f}"


def resolve_settings(args):
    settings = presets.resolve(args.preset or "benchmark")
    if args.command == "critical-s" and not args.preset:
        # closed forms exist only for three rounds and three judges
        settings.update(rounds=3, judges=3)
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(settings)
        if unknown:
            raise CliError(f"unknown config keys: {sorted(unknown)}")
        settings.update(loaded)
    for key in SETTING_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def rules_for(settings):
    if settings["rule"] == "both":
        return list(ScoringRule)
    return [ScoringRule.parse(settings["rule"])]


def make_config(settings, rule):
    partisans = settings["partisans"]
    check_count(partisans, 1, "partisans")
    return BoutConfig(
        n_rounds=settings["rounds"],
        n_judges=settings["judges"],
        alpha=settings["alpha"],
        favoritism=settings["s"],
        partisan_indices=(0,) if partisans else (),
        rule=rule,
    )


def _configs(settings):
    return [make_config(settings, rule) for rule in rules_for(settings)]


def _b_true_values(args, n_rounds):
    if args.b_true is None:
        return None
    if not 0 <= args.b_true <= n_rounds:
        raise CliError(f"b-true must lie in [0, {n_rounds}], got {args.b_true}")
    return (args.b_true,)


def cmd_simulate(args, settings):
    header = [
        "rule", "alpha", "s", "rounds", "judges", "partisans", "b_true", "trials",
        "p_blue", "p_red", "p_draw", "p_correct", "se_blue", "se_red", "se_draw",
    ]
    if settings["trials"] < 1:
        raise CliError("trials must be >= 1")
    rows = []
    for config in _configs(settings):
        spec = CampaignSpec(
            config,
            settings["trials"],
            master_seed=settings["seed"],
            b_true_values=_b_true_values(args, config.n_rounds),
            mixing=args.mixing,
        )
        tally = run_campaign(spec, workers=args.workers)
        probs, ses, correct = tally.probabilities(), tally.standard_errors(), tally.correct_probability()
        for t in tally.rows():
            rows.append(
                [config.rule.value, fmt(config.alpha), fmt(config.favoritism), config.n_rounds,
                 config.n_judges, config.n_partisans, t, int(tally.trials[t]),
                 *map(fmt_p, probs[t]), fmt_p(correct[t]), *map(fmt_p, ses[t])]
            )
    return header, rows, None


def cmd_exact(args, settings):
    header = [
        "rule", "alpha", "s", "rounds", "judges", "partisans", "b_true",
        "p_blue", "p_red", "p_draw", "p_correct",
    ]
    rows, extra = [], []
    for config in _configs(settings):
        if args.k is not None:
            check_count(args.k, config.n_rounds, "k")
            policy = args.k
        else:
            policy = best_response_table(config, args.mixing)
        table = outcome_table(config, policy)
        correct = correct_probabilities(table)
        wanted = _b_true_values(args, config.n_rounds) or range(config.n_rounds + 1)
        for t in wanted:
            rows.append(
                [config.rule.value, fmt(config.alpha), fmt(config.favoritism), config.n_rounds,
                 config.n_judges, config.n_partisans, t, *map(fmt_p, table[t]), fmt_p(correct[t])]
            )
        if args.k is None:
            ratio, blue, red = exact_robbery_ratio(config, args.mixing)
            extra.append({"rule": config.rule.value, "robbery_blue": blue,
                          "robbery_red": red, "ratio": ratio})
    return header, rows, {"robbery": extra}


def cmd_best_response(args, settings):
    header = ["rule", "observed_b", "k_best", "utility_best", "utility_fair"]
    rows = []
    for config in _configs(settings):
        if config.partisan is None:
            raise CliError("best-response needs partisans = 1")
        table = best_response_table(config, args.mixing)
        wanted = _b_true_values(args, config.n_rounds) or range(config.n_rounds + 1)
        for b in wanted:
            k = int(table[b])
            rows.append(
                [config.rule.value, b, k,
                 fmt(expected_utility(b, k, config, args.mixing)),
                 fmt(expected_utility(b, b, config, args.mixing))]
            )
    return header, rows, None


def _alpha_grid(args, settings):
    if args.alpha is not None:
        return [args.alpha]
    if args.alpha_grid:
        try:
            start, stop, step = (float(v) for v in args.alpha_grid.split(":"))
        except ValueError:
            raise CliError("alpha-grid must look like start:stop:step") from None
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    return [round(0.01 * i, 2) for i in range(1, 50)]


def cmd_critical_s(args, settings):
    header = ["alpha", "rule", "info_set", "method", "s_hat"]
    n, j = settings["rounds"], settings["judges"]
    base = make_config({**settings, "partisans": 1}, ScoringRule.MAJORITY_JUDGES)
    closed = n == 3 and j == 3
    if args.info_set:
        try:
            info_sets = [parse_info_set(v, n) for v in args.info_set]
        except ValueError as exc:
            raise CliError(str(exc)) from None
    else:
        info_sets = [1, 0] if n == 3 else list(range((n - 1) // 2, -1, -1))
    rows = []
    for alpha in _alpha_grid(args, settings):
        for rule in rules_for(settings):
            for b in info_sets:
                name = INFO_SET_NAMES_3[b] if n == 3 else str(b)
                try:
                    found = []
                    if closed:
                        found.append(critical_s_closed_form(alpha, rule, b))
                    found.append(critical_s_numeric(alpha, rule, b, base, mixing=args.mixing))
                except ValueError as exc:
                    if "no threshold" in str(exc):
                        raise CliError(f"fair play optimal at {name}; no threshold") from None
                    raise
                for cs in found:
                    rows.append([fmt(alpha), rule.value, name, cs.method, fmt(cs.s_hat)])
    return header, rows, None


def cmd_curve(args, settings):
    header = ["rule", "b_true", "k_awarded", "p_blue_win"]
    rows = []
    for config in _configs(settings):
        if config.partisan is None:
            raise CliError("curve needs partisans = 1")
        b_true = settings["curve_b_true"] if args.b_true is None else args.b_true
        if not 0 <= b_true <= config.n_rounds:
            raise CliError(f"b-true must lie in [0, {config.n_rounds}], got {b_true}")
        curve = win_curve(config, b_true, partisan_noise=not args.noiseless_partisan)
        rows.extend([config.rule.value, b_true, k, fmt_p(p)] for k, p in enumerate(curve))
    return header, rows, None


def cmd_flip_count(args, settings):
    tau = (args.tau or "BBR").upper()
    if set(tau) - {"B", "R"}:
        raise CliError("tau must be a string of B and R")
    judges = settings["judges"]
    if len(tau) * judges > MAX_FLIP_PAIR_CELLS:
        raise CliError(
            f"instance too large: {len(tau)}x{judges} cells exceeds {MAX_FLIP_PAIR_CELLS}"
        )
    results = [
        {"rule": rule.value, "tau": tau,
         "pairs": count_result_flipping_pairs(tau, rule, judges)}
        for rule in rules_for(settings)
    ]
    return results[0] if len(results) == 1 else results


GNUPLOT = {
    "curve": "set datafile separator ','\nset key left top\nset xlabel 'rounds awarded to Blue by the partisan'\n"
             "set ylabel 'P(Blue wins)'\nplot for [r in 'majority-judges majority-rounds'] '{data}' "
             "using (strcol(1) eq r ? $3 : 1/0):4 with linespoints title r\n",
    "simulate": "set datafile separator ','\nset key outside\nset xlabel 'rounds truly won by Blue'\n"
                "set ylabel 'P(correct)'\nplot for [r in 'majority-judges majority-rounds'] '{data}' "
                "using (strcol(1) eq r ? $7 : 1/0):12 with linespoints title r\n",
    "exact": "set datafile separator ','\nset key outside\nset xlabel 'rounds truly won by Blue'\n"
             "set ylabel 'P(correct)'\nplot for [r in 'majority-judges majority-rounds'] '{data}' "
             "using (strcol(1) eq r ? $7 : 1/0):11 with linespoints title r\n",
    "critical-s": "set datafile separator ','\nset logscale y\nset xlabel 'alpha'\nset ylabel 'critical S'\n"
                  "plot for [r in 'majority-judges majority-rounds'] for [i in 'BRR RRR'] '{data}' "
                  "using ((strcol(2) eq r && strcol(3) eq i && strcol(4) eq 'numeric') ? $1 : 1/0):5 with lines title r.' '.i\n",
}


def render(header, rows, extra, fmt_name):
    if fmt_name == "json":
        payload = {"rows": [dict(zip(header, r)) for r in rows]}
        if extra:
            payload.update(extra)
        return json.dumps(payload, indent=2, default=_json_default) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"cannot serialise {type(value)}")


COMMANDS = {
    "simulate": cmd_simulate,
    "exact": cmd_exact,
    "best-response": cmd_best_response,
    "critical-s": cmd_critical_s,
    "curve": cmd_curve,
    "flip-count": cmd_flip_count,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", choices=sorted(presets.PRESETS))
    common.add_argument("--config", help="JSON file of settings; flags override its keys")
    common.add_argument("--alpha", type=float, help="signal error probability, in (0, 0.5)")
    common.add_argument("--s", type=float, help="partisan's utility from a Blue win")
    common.add_argument("--rounds", type=int)
    common.add_argument("--judges", type=int, help="odd panel size")
    common.add_argument("--partisans", type=int, help="0 or 1")
    common.add_argument("--rule", choices=["majority-judges", "majority-rounds", "both"])
    common.add_argument("--trials", type=int, help="Monte Carlo trials per condition")
    common.add_argument("--seed", type=int)
    common.add_argument("--b-true", type=int, help="true Blue rounds (observed b for best-response)")
    common.add_argument("--k", type=int, help="force the partisan to award k rounds (exact)")
    common.add_argument("--mixing", choices=["joint", "pooled"], default=None,
                        help="fair-card model for majority-judges best responses")
    common.add_argument("--workers", type=int, help="worker threads (capped by RINGSIDE_THREADS)")
    common.add_argument("--out", help="write output here instead of standard output")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--gnuplot", action="store_true",
                        help="with --out, also write a gnuplot script next to the data")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="ringside",
        description="Partisan boxing judges under majority-judges and majority-rounds scoring.",
        epilog="Precedence: flags > --config file keys > --preset defaults (benchmark). "
               "Exit codes: 0 ok, 2 invalid configuration, 3 numeric failure.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="Monte Carlo outcome table per true Blue-round count")
    sub.add_parser("exact", parents=[common], help="exact outcome table and robbery rates")
    sub.add_parser("best-response", parents=[common], help="partisan's award for every observed count")
    cs = sub.add_parser("critical-s", parents=[common], help="favouritism thresholds over an alpha grid")
    cs.add_argument("--alpha-grid", help="start:stop:step (default 0.01:0.49:0.01)")
    cs.add_argument("--info-set", action="append", help="e.g. BRR or an observed count; repeatable")
    cv = sub.add_parser("curve", parents=[common], help="P(Blue wins) for each forced award")
    cv.add_argument("--noiseless-partisan", action="store_true",
                    help="partisan observes the true round winners")
    fc = sub.add_parser("flip-count", parents=[common], help="count result-changing signal-error pairs")
    fc.add_argument("--tau", help="true round winners, e.g. BBR")
    return parser


def run(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.mixing is None:
        # thresholds default to the pooled card model the closed forms use
        args.mixing = "pooled" if args.command == "critical-s" else "joint"
    settings = resolve_settings(args)
    result = COMMANDS[args.command](args, settings)
    if args.command == "flip-count":
        text = json.dumps(result) + "\n"
    else:
        text = render(*result, args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        if args.gnuplot and args.command in GNUPLOT and args.format == "csv":
            with open(args.out + ".gp", "w", newline="") as fh:
                fh.write(GNUPLOT[args.command].format(data=args.out))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None):
    try:
        return run(argv)
    except (CliError, ValueError, KeyError, OSError) as exc:
        code = getattr(exc, "code", EXIT_CONFIG)
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return code
    except (ArithmeticError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
