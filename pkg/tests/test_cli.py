"""Exit codes, output formats, and determinism of the command line."""

import json
import subprocess
import sys

import numpy as np
import pytest

from essprk.cli import main
from essprk.methods import catalog
from essprk.tableau import ButcherTableau, emit_tableau


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def negative_weight_file(tmp_path):
    tableau = ButcherTableau(
        A=np.array([[0.0, 0.0], [0.5, 0.0]]),
        b=np.array([1.5, -0.5]),
        label="negative-demo",
    )
    path = tmp_path / "neg.json"
    path.write_bytes(emit_tableau(tableau))
    return str(path)


class TestCheck:
    def test_catalog_label(self, capsys):
        code, out, _ = run_cli(capsys, "check", "ESSPRK(4,4,2)")
        assert code == 0
        doc = json.loads(out)
        assert doc["stages"] == 4
        assert doc["classical_order"] == 2
        assert doc["effective_order"] == 4
        assert doc["ssp_coefficient"] == pytest.approx(0.88, abs=0.01)
        weights = doc["starting_weights"]
        assert weights[0] == 1.0 and weights[1] == 0.0
        # order-four slots stay free until a starting method fixes them
        assert weights[5:] == [None, None, None, None]

    def test_negative_weight_note(self, capsys, negative_weight_file):
        code, out, _ = run_cli(capsys, "check", negative_weight_file)
        assert code == 0
        doc = json.loads(out)
        assert doc["ssp_coefficient"] == 0.0
        assert any("negative weight" in note for note in doc["notes"])

    def test_missing_target(self, capsys):
        code, _, err = run_cli(capsys, "check", "nope.json")
        assert code == 1
        assert err.startswith("error:")
        assert err.count("\n") == 1

    def test_shu_osher_file(self, capsys, tmp_path):
        from essprk.methods import family_n2p1
        from essprk.tableau import emit_shu_osher

        path = tmp_path / "sparse.json"
        path.write_bytes(emit_shu_osher(family_n2p1(3)))
        code, out, _ = run_cli(capsys, "check", str(path))
        assert code == 0
        doc = json.loads(out)
        assert doc["stages"] == 10
        assert doc["effective_order"] == 4
        assert doc["ssp_coefficient"] == pytest.approx(6.0, abs=1e-6)


class TestSsp:
    def test_bracket_and_certificate(self, capsys):
        code, out, _ = run_cli(capsys, "ssp", "SSPRK(3,3)")
        assert code == 0
        doc = json.loads(out)
        assert doc["coefficient"] == pytest.approx(1.0, abs=1e-8)
        lo, hi = doc["bracket"]
        assert lo <= doc["coefficient"] <= hi
        assert doc["certificate"]["feasible"] is True
        assert doc["certificate"]["radius"] == doc["coefficient"]

    def test_zero_coefficient(self, capsys, negative_weight_file):
        code, out, _ = run_cli(capsys, "ssp", negative_weight_file)
        assert code == 0
        doc = json.loads(out)
        assert doc["coefficient"] == 0.0
        assert doc["certificate"]["feasible"] is False


class TestOptimize:
    def test_three_stage_search(self, capsys, tmp_path):
        out_file = tmp_path / "found.json"
        argv = [
            "optimize", "--s", "3", "--q", "3", "--p", "2",
            "--seed", "0", "--restarts", "2", "--out", str(out_file),
        ]
        code, out, _ = run_cli(capsys, *argv)
        assert code == 0
        doc = json.loads(out)
        assert doc["converged"] is True
        assert doc["coefficient"] == pytest.approx(1.0, abs=1e-2)
        assert doc["worst_residual"] <= 1e-10
        assert out_file.exists()

        code2, out2, _ = run_cli(capsys, "check", str(out_file))
        assert code2 == 0
        parsed = json.loads(out2)
        assert parsed["effective_order"] == 3
        assert parsed["classical_order"] == 2

    def test_seeded_runs_are_byte_identical(self, capsys, tmp_path):
        argv = [
            "optimize", "--s", "3", "--q", "3", "--p", "2",
            "--seed", "7", "--restarts", "2",
        ]
        code_a, out_a, _ = run_cli(capsys, *argv, "--out", str(tmp_path / "a.json"))
        code_b, out_b, _ = run_cli(capsys, *argv, "--out", str(tmp_path / "b.json"))
        assert code_a == code_b == 0
        assert out_a.replace("a.json", "b.json") == out_b
        assert (tmp_path / "a.json").read_bytes() == (
            tmp_path / "b.json"
        ).read_bytes()

    def test_invalid_order_pair(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "optimize", "--s", "3", "--q", "2", "--p", "3",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 1
        assert "error:" in err


class TestCatalogCommand:
    def test_lists_every_entry(self, capsys):
        code, out, _ = run_cli(capsys, "catalog")
        assert code == 0
        rows = json.loads(out)
        assert [r["label"] for r in rows] == [e.label for e in catalog()]
        by_label = {r["label"]: r for r in rows}
        assert by_label["ESSPRK(4,3,2)"]["start_stages"] == 5
        assert by_label["ESSPRK(4,3,2)"]["stop_stages"] == 4
        assert by_label["SSPRK(3,3)"]["start_stages"] is None
        for r in rows:
            assert r["effective_ssp_coefficient"] == pytest.approx(
                r["ssp_coefficient"] / r["stages"]
            )

    def test_byte_identical(self, capsys):
        _, out_a, _ = run_cli(capsys, "catalog")
        _, out_b, _ = run_cli(capsys, "catalog")
        assert out_a == out_b


class TestConvergenceCommand:
    def test_composite_csv(self, capsys):
        code, out, err = run_cli(capsys, "convergence", "--scheme", "ESSPRK(4,3,2)")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,dt,error"
        assert len(lines) == 7
        errors = [float(line.split(",")[2]) for line in lines[1:]]
        assert all(a > b for a, b in zip(errors, errors[1:]))
        assert "slope" in err

    def test_unknown_scheme(self, capsys):
        code, _, err = run_cli(capsys, "convergence", "--scheme", "RK(99)")
        assert code == 1
        assert "error:" in err


class TestBurgersCommand:
    def test_published_setting_keeps_variation_low(self, capsys):
        code, out, err = run_cli(
            capsys, "burgers", "--scheme", "ESSPRK(4,4,2)",
            "--ic", "continuous", "--sigma", "0.88",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "step,t,total_variation"
        tv = np.array([float(line.split(",")[2]) for line in lines[1:]])
        assert tv[0] == pytest.approx(1.0)
        assert tv[-1] <= 1.0
        assert np.max(np.diff(tv)) <= 1e-10
        assert "monotone=True" in err

    def test_square_wave_past_limit(self, capsys):
        code, out, err = run_cli(
            capsys, "burgers", "--scheme", "ESSPRK(5,4,2)",
            "--ic", "square", "--sigma", "2.15",
        )
        assert code == 0
        assert "monotone=False" in err

    def test_main_only_accepted(self, capsys):
        code, out, _ = run_cli(
            capsys, "burgers", "--scheme", "SSPRK(3,3)",
            "--ic", "square", "--sigma", "0.9", "--tf", "0.2",
        )
        assert code == 0
        tv = np.array(
            [float(line.split(",")[2]) for line in out.strip().splitlines()[1:]]
        )
        assert np.max(np.diff(tv)) <= 1e-10

    def test_missing_sigma_is_usage_error(self, capsys):
        code, _, _ = run_cli(
            capsys, "burgers", "--scheme", "ESSPRK(4,4,2)"
        )
        assert code == 2


class TestSigmaTableCommand:
    def test_rows_and_safety_margin(self, capsys):
        code, out, _ = run_cli(capsys, "sigma-table")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "q,p,s,sigma_max,percent_over_C"
        assert len(lines) == 6
        coefficients = {
            (e.q, e.p, e.main.b.size): e.ssp_coefficient
            for e in catalog()
            if e.start is not None
        }
        for line in lines[1:]:
            q, p, s, sigma, over = line.split(",")
            key = (int(q), int(p), int(s))
            assert key in coefficients
            assert float(sigma) >= coefficients[key] - 0.03

    def test_byte_identical(self, capsys):
        _, out_a, _ = run_cli(capsys, "sigma-table")
        _, out_b, _ = run_cli(capsys, "sigma-table")
        assert out_a == out_b


class TestUsageErrors:
    def test_no_arguments(self, capsys):
        assert run_cli(capsys)[0] == 2

    def test_unknown_command(self, capsys):
        assert run_cli(capsys, "frobnicate")[0] == 2

    def test_help_exits_cleanly(self, capsys):
        code, out, _ = run_cli(capsys, "--help")
        assert code == 0
        assert "subcommand" in out or "usage" in out


def test_console_script_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "essprk.cli", "catalog"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[0]["label"] == "ESSPRK(3,3,2)"
