import csv
import io
import json
from pathlib import Path

import pytest

from ringside import presets
from ringside.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize(
    "argv, golden",
    [
        (["curve", "--preset", "benchmark"], "curve_benchmark.csv"),
        (["critical-s", "--alpha-grid", "0.1:0.3:0.1"], "critical_s.csv"),
        (["simulate", "--preset", "benchmark", "--trials", "2000", "--seed", "7", "--b-true", "6"],
         "simulate_b6.csv"),
        (["exact", "--preset", "mens-olympic"], "exact_mens_olympic.csv"),
    ],
)
def test_golden_outputs(capsys, argv, golden):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()


class TestSimulate:
    def test_row_count_and_header(self, capsys):
        code, out, _ = run(capsys, "simulate", "--preset", "benchmark", "--trials", "200", "--seed", "7")
        assert code == 0
        assert out.splitlines()[0] == (
            "rule,alpha,s,rounds,judges,partisans,b_true,trials,p_blue,p_red,p_draw,"
            "p_correct,se_blue,se_red,se_draw"
        )
        table = rows(out)
        assert len(table) == 26
        assert [r["b_true"] for r in table[:13]] == [str(t) for t in range(13)]
        assert "\r" not in out

    def test_mens_olympic_preset(self, capsys):
        code, out, _ = run(capsys, "simulate", "--preset", "mens-olympic", "--trials", "100")
        table = rows(out)
        assert code == 0
        assert {(r["rounds"], r["judges"]) for r in table} == {("3", "5")}
        assert len(table) == 8

    def test_invalid_alpha(self, capsys):
        code, out, err = run(capsys, "simulate", "--alpha", "0.6")
        assert code == 2
        assert "alpha must lie in (0, 0.5)" in err
        assert out == ""

    @pytest.mark.parametrize(
        "flag, value, message",
        [("--judges", "4", "odd"), ("--rounds", "0", "rounds"), ("--partisans", "2", "partisans"),
         ("--s", "-1", "nonnegative")],
    )
    def test_invalid_config(self, capsys, flag, value, message):
        code, _, err = run(capsys, "simulate", flag, value, "--trials", "10")
        assert code == 2 and message in err

    def test_deterministic_across_workers(self, capsys):
        args = ["simulate", "--preset", "benchmark", "--trials", "40000", "--seed", "7", "--b-true", "6"]
        _, one, _ = run(capsys, *args, "--workers", "1")
        _, many, _ = run(capsys, *args, "--workers", "8")
        assert one == many


class TestPrecedence:
    def test_config_file_over_preset_and_flag_over_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"alpha": 0.2, "rounds": 10}))
        _, out, _ = run(capsys, "exact", "--preset", "high-favoritism", "--config", str(cfg),
                        "--rule", "majority-judges", "--b-true", "5")
        (row,) = rows(out)
        assert (row["alpha"], row["s"], row["rounds"]) == ("0.2", "1", "10")
        _, out, _ = run(capsys, "exact", "--config", str(cfg), "--alpha", "0.3",
                        "--rule", "majority-judges", "--b-true", "5")
        assert rows(out)[0]["alpha"] == "0.3"

    def test_unknown_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"colour": "blue"}))
        code, _, err = run(capsys, "exact", "--config", str(cfg))
        assert code == 2 and "unknown config keys" in err

    def test_presets_encode_configurations(self):
        expected = {
            "benchmark": (12, 3, 0.1, 0.8, 1),
            "high-disagreement": (12, 3, 0.2, 0.8, 1),
            "high-favoritism": (12, 3, 0.1, 1.0, 1),
            "womens-pro": (10, 3, 0.1, 0.8, 1),
            "mens-olympic": (3, 5, 0.1, 0.8, 1),
            "womens-olympic": (4, 5, 0.1, 0.8, 1),
            "all-fair": (12, 3, 0.1, 0.8, 0),
        }
        for name, values in expected.items():
            p = presets.resolve(name)
            assert (p["rounds"], p["judges"], p["alpha"], p["s"], p["partisans"]) == values


class TestCriticalS:
    def test_contains_benchmark_alpha_and_agrees(self, capsys):
        code, out, _ = run(capsys, "critical-s")
        assert code == 0
        table = rows(out)
        assert len(table) == 49 * 2 * 2 * 2
        by_key = {}
        for r in table:
            by_key.setdefault((r["alpha"], r["rule"], r["info_set"]), {})[r["method"]] = float(r["s_hat"])
        assert ("0.1", "majority-judges", "BRR") in by_key
        for methods in by_key.values():
            assert abs(methods["closed-form"] - methods["numeric"]) < 1e-6

    def test_bbb_rejected(self, capsys):
        code, _, err = run(capsys, "critical-s", "--info-set", "BBB")
        assert code == 2
        assert "fair play optimal at BBB; no threshold" in err

    def test_numeric_only_for_longer_bouts(self, capsys):
        code, out, _ = run(capsys, "critical-s", "--preset", "benchmark", "--alpha", "0.1",
                           "--rule", "majority-judges", "--info-set", "5")
        (row,) = rows(out)
        assert code == 0 and row["method"] == "numeric" and row["info_set"] == "5"


class TestCurve:
    def test_rows(self, capsys):
        _, out, _ = run(capsys, "curve")
        table = rows(out)
        assert len(table) == 26
        mj = [float(r["p_blue_win"]) for r in table if r["rule"] == "majority-judges"]
        assert len(set(mj[:7])) == 1 and len(set(mj[7:])) == 1 and mj[7] > mj[6]

    def test_mens_olympic_default_b_true(self, capsys):
        _, out, _ = run(capsys, "curve", "--preset", "mens-olympic")
        table = rows(out)
        assert {r["b_true"] for r in table} == {"1"} and len(table) == 8

    def test_b_true_out_of_range(self, capsys):
        code, _, err = run(capsys, "curve", "--b-true", "13")
        assert code == 2 and "b-true" in err


class TestFlipCount:
    @pytest.mark.parametrize("rule, pairs", [("majority-rounds", 6), ("majority-judges", 12)])
    def test_pair_counts(self, capsys, rule, pairs):
        _, out, _ = run(capsys, "flip-count", "--tau", "BBR", "--rule", rule)
        assert json.loads(out) == {"rule": rule, "tau": "BBR", "pairs": pairs}

    def test_unanimous_both_rules(self, capsys):
        _, out, _ = run(capsys, "flip-count", "--tau", "BBB")
        assert [r["pairs"] for r in json.loads(out)] == [0, 0]

    def test_oversized(self, capsys):
        code, _, err = run(capsys, "flip-count", "--tau", "BBBBBBBBB")
        assert code == 2 and "too large" in err


class TestOtherCommands:
    def test_best_response(self, capsys):
        _, out, _ = run(capsys, "best-response", "--rule", "majority-judges")
        table = rows(out)
        assert [int(r["k_best"]) for r in table] == [0, 1, 2, 3, 4, 7, 7, 7, 8, 9, 10, 11, 12]

    def test_exact_json_has_robbery(self, capsys):
        _, out, _ = run(capsys, "exact", "--format", "json", "--rule", "majority-judges")
        payload = json.loads(out)
        assert len(payload["rows"]) == 13
        assert payload["robbery"][0]["ratio"] == pytest.approx(12.49, abs=0.01)

    def test_exact_forced_k(self, capsys):
        _, out, _ = run(capsys, "exact", "--k", "7", "--b-true", "6", "--rule", "majority-judges")
        assert float(rows(out)[0]["p_blue"]) == pytest.approx(0.497423, abs=1e-6)

    def test_out_and_gnuplot(self, capsys, tmp_path):
        target = tmp_path / "curve.csv"
        code, out, _ = run(capsys, "curve", "--out", str(target), "--gnuplot")
        assert code == 0 and out == ""
        assert target.read_text().startswith("rule,b_true,k_awarded,p_blue_win\n")
        assert str(target) in (tmp_path / "curve.csv.gp").read_text()

    def test_threads_env(self, capsys, monkeypatch):
        monkeypatch.setenv("RINGSIDE_THREADS", "2")
        code, _, _ = run(capsys, "simulate", "--trials", "100", "--b-true", "6")
        assert code == 0
