"""
Command-line surface: commands, formats and exit codes
"""

import io
import json

import pandas as pd
import pytest

from core import cli
from core.cli import EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, run
from core.errors import InvariantViolation


@pytest.fixture(autouse=True)
def isolated_env(tmp_path, monkeypatch):
    """Reports under tmp_path and no inherited NRZ_* configuration"""
    import os

    for key in list(os.environ):
        if key.startswith('NRZ_'):
            monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("NRZ_REPORTS_DIR", str(tmp_path / "reports"))
    monkeypatch.setenv("NRZ_LOGS_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("NRZ_TRIAL_BLOCK_SIZE", "50")


def run_json(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    assert code == EXIT_OK, out
    return json.loads(out)


class TestVerdictCommand:
    """verdict element / diagonal / group"""

    def test_odd_cycle_type(self, capsys):
        record = run_json(capsys, "verdict", "element", "--cycle-type", "3,5,7", "--n", "15")
        assert record["status"] == "not_realizable"
        assert record["schema_version"] == "nrz-verdict/1"
        assert {"mu", "two_min_primes"} <= {w["rule"] for w in record["witnesses"]}

    def test_small_element(self, capsys):
        record = run_json(capsys, "verdict", "element", "--element", "3; 2,3,1; -,+,+")
        assert record["status"] == "realizable"
        assert record["certificate"]

    def test_diagonal_words(self, capsys):
        record = run_json(capsys, "verdict", "diagonal", "--words", "e1,e2,e3,e4", "--n", "9")
        assert record["status"] == "not_realizable"

    def test_diagonal_rows_file(self, capsys, tmp_path):
        rows = tmp_path / "star.txt"
        rows.write_text("0011\n0101\n1000\n", encoding="utf-8")
        record = run_json(capsys, "verdict", "diagonal", "--rows", str(rows))
        assert record["status"] == "realizable"

    def test_group_file_with_closure(self, capsys, tmp_path):
        group = tmp_path / "s5.txt"
        group.write_text("5; 2,1,3,4,5; +,+,+,+,+\n5; 2,3,4,5,1; +,+,+,+,+\n", encoding="utf-8")
        record = run_json(capsys, "verdict", "group", "--file", str(group), "--close")
        assert record["status"] == "realizable"

    def test_missing_input(self, capsys):
        assert run(["verdict", "element"]) == EXIT_USAGE

    def test_words_without_n(self, capsys):
        assert run(["verdict", "diagonal", "--words", "e1"]) == EXIT_USAGE

    def test_unreadable_file(self, capsys, tmp_path):
        assert run(["verdict", "group", "--file", str(tmp_path / "missing.txt")]) == EXIT_USAGE


class TestTablesAndReports:
    def test_gf_table(self, capsys):
        rows = run_json(capsys, "table", "gf", "--theta", "1/2", "--max-n", "4")
        assert [r["a_scaled"] for r in rows] == [1, 1, 1, 9, 33]

    def test_partitions_table_csv(self, capsys):
        assert run(["table", "partitions", "--max-n", "9", "--format", "csv"]) == EXIT_OK
        df = pd.read_csv(io.StringIO(capsys.readouterr().out))
        assert df.loc[df["N"] == 9, "q_ge3"].item() == 2
        assert df.loc[df["N"] == 5, "q_odd"].item() == 3

    def test_pn_table(self, capsys):
        rows = run_json(capsys, "table", "pn", "--n-values", "9,100")
        assert [r["n"] for r in rows] == [9, 100]

    def test_rn_table_needs_values(self, capsys):
        assert run(["table", "rn"]) == EXIT_USAGE

    def test_rn_table_text(self, capsys):
        assert run(["table", "rn", "--n-values", "45", "--format", "table"]) == EXIT_OK
        assert "expected_R_n" in capsys.readouterr().out

    def test_counts(self, capsys):
        rows = run_json(capsys, "table", "counts", "--max-n", "16")
        assert rows[7]["two_group_lower_log2"] == 4

    def test_gsig(self, capsys):
        record = run_json(capsys, "gsig", "--m", "5", "--a", "1", "--b", "2")
        assert record["holds"] is True
        assert record["lhs"] == "4"

    def test_gsig_needs_weights(self, capsys):
        assert run(["gsig", "--m", "5"]) == EXIT_USAGE

    def test_gsig_sweep_failure_is_internal(self, capsys, mocker):
        broken = mocker.Mock(holds=False)
        broken.to_dict.return_value = {"m": 3}
        mocker.patch("core.g_signature.gsignature_sweep", return_value=[broken])
        assert run(["gsig", "--sweep", "3"]) == EXIT_INTERNAL

    def test_facts(self, capsys):
        records = run_json(capsys, "facts", "--n", "4")
        assert any(r["subject"] == "O(4,Z)" and r["status"] == "not_realizable" for r in records)

    def test_edmonds(self, capsys):
        record = run_json(capsys, "edmonds", "--element", "3; 2,3,1; +,+,+", "--p", "3")
        assert record["invariants"]["r"] == 1

    def test_trees_realize(self, capsys):
        record = run_json(capsys, "trees", "realize-rank2", "--words", "e1e2,e3e4", "--n", "4")
        assert record["generators"]

    def test_trees_catalog(self, capsys):
        assert len(run_json(capsys, "trees", "catalog", "--n", "4")) == 2


class TestOracleCommand:
    def test_odd_order(self, capsys):
        record = run_json(capsys, "oracle", "--what", "odd-order", "--n", "4")
        assert record["count"] == 9

    def test_signed(self, capsys):
        assert run_json(capsys, "oracle", "--what", "signed-odd-order", "--n", "3")["count"] == 9

    def test_subspaces(self, capsys):
        assert run_json(capsys, "oracle", "--what", "subspaces", "--n", "3")["count"] == 16
        assert run_json(capsys, "oracle", "--what", "even-subspaces", "--n", "4", "--k", "2")["count"] == 7

    def test_partitions(self, capsys):
        record = run_json(capsys, "oracle", "--what", "partitions", "--n", "9", "--predicate", "odd_ge3")
        assert record["count"] == 2

    def test_cap_is_usage_error(self, capsys):
        assert run(["oracle", "--what", "odd-order", "--n", "12"]) == EXIT_USAGE


class TestSampleCommand:
    def test_csv_to_stdout(self, capsys):
        assert run(["sample", "odd-perm", "--n", "15", "--theta", "1/2", "--trials", "100", "--seed", "5"]) == EXIT_OK
        df = pd.read_csv(io.StringIO(capsys.readouterr().out))
        assert list(df.columns) == ["n", "theta_num", "theta_den", "trials", "seed", "stat", "value", "stderr"]

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "runs" / "sub.csv"
        assert run(["sample", "subspace", "--n", "5", "--k", "2", "--trials", "30", "--seed", "1",
                    "--output", str(target)]) == EXIT_OK
        assert capsys.readouterr().out == ""
        assert target.exists()

    def test_bare_output_name_lands_in_reports(self, capsys, tmp_path):
        assert run(["sample", "partition", "--n", "20", "--trials", "30", "--seed", "1",
                    "--output", "part.csv"]) == EXIT_OK
        assert (tmp_path / "reports" / "part.csv").exists()

    def test_engine_receives_arguments(self, capsys, mocker):
        run_odd_perm = mocker.patch("core.experiments.ExperimentEngine.run_odd_perm",
                                    return_value=pd.DataFrame(columns=["n"]))
        assert run(["--jobs", "3", "sample", "odd-perm", "--n", "7", "--seed", "42", "--stats", "C_1"]) == EXIT_OK
        args, kwargs = run_odd_perm.call_args
        assert args == (7, "1")
        assert kwargs == {"trials": 10000, "seed": 42, "jobs": 3, "stats": ["C_1"]}

    def test_seed_required(self, capsys):
        assert run(["sample", "odd-perm", "--n", "7"]) == EXIT_USAGE

    def test_bad_theta(self, capsys):
        assert run(["sample", "odd-perm", "--n", "7", "--seed", "1", "--theta", "2"]) == EXIT_USAGE

    def test_unknown_stat(self, capsys):
        assert run(["sample", "subspace", "--n", "4", "--seed", "1", "--stats", "P_n"]) == EXIT_USAGE


class TestExitCodes:
    def test_unknown_command(self, capsys):
        assert run(["bogus"]) == EXIT_USAGE

    def test_bad_setting(self, capsys, monkeypatch):
        monkeypatch.setenv("NRZ_LOG_BASE", "7")
        assert run(["facts", "--n", "4"]) == EXIT_USAGE

    def test_invariant_violation(self, capsys, mocker):
        # the parser is rebuilt per call, so it binds the patched handler
        mocker.patch.object(cli, "cmd_facts", side_effect=InvariantViolation("broken"))
        assert run(["facts", "--n", "4"]) == EXIT_INTERNAL

    def test_value_error_in_handler_is_internal(self, capsys, mocker):
        mocker.patch.object(cli, "cmd_facts", side_effect=ValueError("bad arithmetic"))
        assert run(["facts", "--n", "4"]) == EXIT_INTERNAL

    def test_inconsistent_experiment_settings(self, capsys, monkeypatch):
        monkeypatch.setenv("NRZ_SL_NODE_BUDGET", "10")
        assert run(["sample", "subspace", "--n", "4", "--trials", "10", "--seed", "1"]) == EXIT_USAGE
        assert "SL_NODE_BUDGET" in capsys.readouterr().err

    def test_help(self, capsys):
        assert run(["--help"]) == EXIT_OK

    def test_trees_help_marks_hub_as_lower_bound(self, capsys):
        assert run(["trees", "--help"]) == EXIT_OK
        assert "lower bound" in " ".join(capsys.readouterr().out.split())
