"""
Monte Carlo engine: layout, reproducibility and aggregation
"""

import json
import math

import pandas as pd
import pytest

from config.settings import Settings
from core import experiments
from core.errors import PreconditionError
from core.experiments import CSV_COLUMNS, ExperimentEngine


@pytest.fixture
def engine(settings):
    return ExperimentEngine(settings)


class TestLayout:
    """Columns, dtypes and one row per statistic"""

    def test_odd_perm_columns(self, engine):
        df = engine.run_odd_perm(15, "1/2", trials=120, seed=7)
        assert list(df.columns) == CSV_COLUMNS
        assert list(df["stat"]) == ["P_n", "C_1", "pass_rate", "num_cycles"]
        assert str(df["theta_num"].dtype) == "Int64"
        assert (df["theta_num"] == 1).all() and (df["theta_den"] == 2).all()
        assert (df["trials"] == 120).all()

    def test_theta_empty_without_weight(self, engine):
        df = engine.run_subspace(4, 2, trials=60, seed=1)
        assert df["theta_num"].isna().all()
        assert df["theta_den"].isna().all()

    def test_stats_subset(self, engine):
        df = engine.run_odd_perm(9, 1, trials=40, seed=3, stats=["C_1"])
        assert list(df["stat"]) == ["C_1"]

    def test_unknown_stat(self, engine):
        with pytest.raises(PreconditionError):
            engine.run_odd_perm(9, 1, trials=40, seed=3, stats=["rank"])

    def test_no_trials(self, engine):
        with pytest.raises(PreconditionError):
            engine.run_subspace(4, 1, trials=0, seed=3)

    def test_bad_rank(self, engine):
        with pytest.raises(PreconditionError):
            engine.run_subspace(4, 5, trials=10, seed=3)

    def test_seed_out_of_range(self, engine):
        with pytest.raises(PreconditionError):
            engine.run_subspace(4, 1, trials=10, seed=2 ** 64)


class TestValues:
    """Statistics with known values"""

    def test_fixed_rank(self, engine):
        df = engine.run_subspace(4, 2, trials=100, seed=5).set_index("stat")
        assert df.loc["rank", "value"] == 2
        assert df.loc["rank", "stderr"] == 0
        # rank <= 2 subgroups are always realizable
        assert df.loc["not_excluded", "value"] == 1

    def test_partition_no_ones(self, engine):
        df = engine.run_partition(9, 0, trials=100, seed=11).set_index("stat")
        assert df.loc["C_1", "value"] == 0
        assert 0 <= df.loc["R_n", "value"] <= 1
        assert df.loc["pass_rate", "value"] == 1

    def test_mean_fixed_points_near_theory(self, engine):
        """E[C_1] = theta A_{n,1}; for n = 4, theta = 1 this is 4/3"""
        df = engine.run_odd_perm(4, 1, trials=4000, seed=13, stats=["C_1"])
        row = df.iloc[0]
        assert abs(row["value"] - 4 / 3) < 5 * row["stderr"]


class TestReproducibility:
    """Results depend on the seed only"""

    def test_jobs_do_not_matter(self, engine):
        single = engine.run_odd_perm(21, 1, trials=230, seed=99, jobs=1)
        parallel = engine.run_odd_perm(21, 1, trials=230, seed=99, jobs=2)
        pd.testing.assert_frame_equal(single, parallel)

    def test_same_seed(self, engine):
        a = engine.run_partition(30, None, trials=80, seed=4)
        b = engine.run_partition(30, None, trials=80, seed=4)
        pd.testing.assert_frame_equal(a, b)

    def test_blocks_use_substreams(self, engine, mocker):
        spy = mocker.spy(experiments, "_run_block")
        engine.run_subspace(5, None, trials=120, seed=8)
        indices = [call.args[3] for call in spy.call_args_list]
        sizes = [call.args[4] for call in spy.call_args_list]
        assert indices == [0, 1, 2]
        assert sizes == [50, 50, 20]


class TestAggregation:
    def test_mean_and_stderr(self, engine):
        # values 1, 3, 1, 3 split over two blocks
        results = [{"x": (4.0, 10.0)}, {"x": (4.0, 10.0)}]
        df = engine._aggregate(6, None, 4, 0, ("x",), results)
        assert df.loc[0, "value"] == 2
        assert df.loc[0, "stderr"] == pytest.approx(math.sqrt(1 / 3))

    def test_single_trial_has_zero_stderr(self, engine):
        df = engine._aggregate(6, None, 1, 0, ("x",), [{"x": (5.0, 25.0)}])
        assert df.loc[0, "stderr"] == 0


class TestOutput:
    def test_save_csv_to_reports_dir(self, engine, settings):
        df = engine.run_subspace(4, 1, trials=20, seed=2)
        path = engine.save(df, "subspace.csv")
        assert path == str(settings.REPORTS_DIR / "subspace.csv")
        loaded = pd.read_csv(path)
        assert list(loaded.columns) == CSV_COLUMNS
        assert len(loaded) == len(df)

    def test_save_json_explicit_path(self, engine, tmp_path):
        df = engine.run_subspace(4, 1, trials=20, seed=2)
        path = engine.save(df, str(tmp_path / "out" / "subspace.json"), fmt="json")
        records = json.loads(open(path, encoding="utf-8").read())
        assert [r["stat"] for r in records] == list(df["stat"])

    def test_csv_leaves_theta_blank(self, engine):
        text = ExperimentEngine.render(engine.run_subspace(3, 1, trials=10, seed=2))
        first_row = text.splitlines()[1].split(",")
        assert first_row[1] == "" and first_row[2] == ""


class TestConfiguration:
    def test_inconsistent_cutoffs_rejected(self, tmp_path):
        settings = Settings(_env_file=None, REPORTS_DIR=tmp_path, EXACT_CUTOFF=100, PARTITION_TABLE_CUTOFF=200)
        with pytest.raises(ValueError):
            ExperimentEngine(settings)
