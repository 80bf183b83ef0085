"""Command-line interface: formats, round-trips, determinism, exit codes."""

import json
import re

import numpy as np
import pytest

from cptlottery.cli import main, render_table
from cptlottery import design_optimal, expand_design
from cptlottery.presets import PRESETS


def run_cli(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse errors
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


class TestDesignCommand:
    def test_table_smoke(self, capsys):
        code, out, _ = run_cli(capsys, "design", "--preset", "canada", "--n", "1000")
        assert code == 0
        assert "ticket price" in out and "status       : finite" in out
        assert "1 in" in out

    def test_scientific_n(self, capsys):
        code, out, _ = run_cli(capsys, "design", "--preset", "canada", "--n", "1e3")
        assert code == 0
        assert "tickets      : 1,000" in out

    def test_json_round_trip(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys,
            "design", "--preset", "canada", "--n", "2000",
            "--format", "json", "--out", str(out_path),
        )
        assert code == 0
        report = json.loads(out)
        assert json.loads(out_path.read_text()) == report
        # stable schema keys
        assert set(report) == {
            "params", "n", "n_minus", "n_plus", "ticket_price", "v_star",
            "profit", "max_prize", "gain_ratio", "status", "eps", "buckets",
            "zero_count", "timing_ms",
        }
        assert set(report["params"]) == {"alpha", "beta", "lambda", "gamma_plus", "gamma_minus"}
        # re-rendering the parsed report reproduces the table byte for byte
        assert render_table(report) == render_table(json.loads(json.dumps(report)))
        # and it matches the library's own numbers
        d = design_optimal(PRESETS["canada"].params, 2000)
        t = expand_design(d)
        assert report["profit"] == t.profit
        assert report["zero_count"] == t.zero_count

    def test_deterministic_modulo_timing(self, capsys):
        outs = []
        for _ in range(2):
            code, out, _ = run_cli(capsys, "design", "--preset", "usa", "--n", "500",
                                   "--price", "2")
            assert code == 0
            outs.append(re.sub(r"wall time.*", "", out))
        assert outs[0] == outs[1]

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(capsys, "design", "--preset", "canada", "--n", "1000",
                               "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "lo,hi,count"
        assert lines[1].startswith("0,0,")
        total = sum(int(l.rsplit(",", 1)[1]) for l in lines[1:])
        assert total == 1000

    def test_zero_design_report(self, capsys):
        code, out, _ = run_cli(
            capsys, "design", "--alpha", "0.5", "--beta", "0.5", "--lambda", "4",
            "--gamma-plus", "1", "--gamma-minus", "1", "--n", "10",
        )
        assert code == 0
        assert "status       : zero" in out

    def test_unbounded_exit_code(self, capsys):
        code, _, err = run_cli(
            capsys, "design", "--alpha", "0.5", "--beta", "0.5", "--lambda", "1",
            "--gamma-plus", "1", "--gamma-minus", "1", "--n", "100",
        )
        assert code == 3
        assert "unbounded" in err

    def test_preset_price_applies(self, capsys):
        code, out, _ = run_cli(capsys, "design", "--preset", "greece", "--n", "1000")
        assert code == 0
        assert "ticket price : 2" in out

    def test_price_zero_reverts_to_unconstrained(self, capsys):
        code, _, err = run_cli(capsys, "design", "--preset", "greece", "--n", "100",
                               "--price", "0")
        assert code == 3  # greek exponents diverge without the cap
        assert "unbounded" in err

    def test_epsilon_flag(self, capsys):
        code, out, _ = run_cli(capsys, "design", "--preset", "canada", "--n", "400",
                               "--epsilon", "0.05", "--format", "json")
        assert code == 0
        assert json.loads(out)["eps"] == 0.05

    def test_profit_floor_flag(self, capsys):
        code0, out0, _ = run_cli(capsys, "design", "--preset", "canada", "--n", "200",
                                 "--format", "json")
        base = json.loads(out0)["profit"]
        code, out, _ = run_cli(capsys, "design", "--preset", "canada", "--n", "200",
                               "--profit-floor", str(0.5 * base), "--format", "json")
        assert code == 0
        rep = json.loads(out)
        assert rep["eps"] > 0.0
        assert rep["profit"] == pytest.approx(0.5 * base, rel=1e-5)

    def test_bad_flags_exit_two(self, capsys):
        code, _, _ = run_cli(capsys, "design", "--preset", "narnia", "--n", "10")
        assert code == 2
        code, _, _ = run_cli(capsys, "design", "--n", "100")  # missing params
        assert code == 2
        code, _, _ = run_cli(capsys, "design", "--preset", "canada", "--n", "2.5")
        assert code == 2


class TestEvalCommand:
    def test_zero_lottery(self, capsys, tmp_path):
        f = tmp_path / "lot.csv"
        f.write_text("outcome,count\n0.0,10\n")
        code, out, _ = run_cli(capsys, "eval", "--preset", "canada", str(f))
        assert code == 0
        assert "expected utility/ticket: 0" in out

    def test_single_outcome(self, capsys, tmp_path):
        f = tmp_path / "lot.csv"
        f.write_text("outcome,count\n7.0,3\n")
        code, out, _ = run_cli(capsys, "eval", "--preset", "canada", str(f))
        assert code == 0
        assert f"{7.0 ** 0.42:.6g}"[:6] in out

    def test_designed_lottery_round_trip(self, capsys, tmp_path):
        d = design_optimal(PRESETS["canada"].params, 300)
        gains = d.gain.outcomes_slice(1, d.n_plus)
        levels, counts = np.unique(np.round(gains, 12), return_counts=True)
        rows = [f"{w},{c}" for w, c in d.loss_levels]
        rows += [f"{w},{c}" for w, c in zip(levels, counts)]
        f = tmp_path / "lot.csv"
        f.write_text("outcome,count\n" + "\n".join(rows) + "\n")
        code, out, _ = run_cli(capsys, "eval", "--preset", "canada", str(f))
        assert code == 0
        eu = float(out.split("expected utility/ticket:")[1].splitlines()[0])
        assert abs(eu) < 1e-6
        profit = float(out.split("seller profit          :")[1].split()[0].replace(",", ""))
        assert profit == pytest.approx(d.profit, rel=1e-4)

    def test_malformed_line_number(self, capsys, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("outcome,count\n1.0,2\nnope,3\n")
        code, _, err = run_cli(capsys, "eval", "--preset", "canada", str(f))
        assert code == 2
        assert "line 3" in err

    def test_bad_header(self, capsys, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("prize,count\n1.0,2\n")
        code, _, err = run_cli(capsys, "eval", "--preset", "canada", str(f))
        assert code == 2
        assert "line 1" in err

    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "eval", "--preset", "canada", "/nonexistent.csv")
        assert code == 2


class TestOracleCommand:
    def test_unconstrained(self, capsys):
        code, out, _ = run_cli(capsys, "oracle", "--preset", "canada", "--n", "4")
        assert code == 0
        assert "profit" in out and "n_minus" in out

    def test_fixed_price(self, capsys):
        code, out, _ = run_cli(capsys, "oracle", "--preset", "usa", "--n", "5",
                               "--price", "2")
        assert code == 0
        assert "ticket_price" in out

    def test_too_large(self, capsys):
        code, _, err = run_cli(capsys, "oracle", "--preset", "canada", "--n", "9")
        assert code == 2
        assert "n <= 8" in err
