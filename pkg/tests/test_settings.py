"""
Settings validation, logging setup and number helpers
"""

import logging
from fractions import Fraction
from pathlib import Path

import pytest
from pydantic import ValidationError

from config.settings import Settings
from core.errors import ParseError, PreconditionError
from core.utils import (
    atomic_write,
    ceil_log2,
    format_fraction,
    log2_int,
    log_function,
    parse_fraction,
    setup_logging,
    v2,
)


class TestSettingsValidation:
    """Field validators and cross-field checks"""

    def test_defaults(self, settings):
        assert settings.LOG_BASE == "e"
        assert settings.EXACT_CUTOFF == 5000
        assert settings.CATALOG_HINGE_SCOPE == "hub"

    def test_env_prefix(self, monkeypatch, tmp_path):
        monkeypatch.setenv("NRZ_SL_MAX_DEPTH", "4")
        monkeypatch.setenv("NRZ_LOG_LEVEL", "debug")
        s = Settings(_env_file=None, REPORTS_DIR=tmp_path)
        assert s.SL_MAX_DEPTH == 4
        assert s.LOG_LEVEL == "DEBUG"

    @pytest.mark.parametrize("field,value", [
        ("JOBS", 0),
        ("TRIAL_BLOCK_SIZE", -5),
        ("LOG_LEVEL", "LOUD"),
        ("EXACT_CUTOFF", 3),
        ("LOG_BASE", "3"),
        ("SL_MAX_DEPTH", 13),
        ("CATALOG_HINGE_SCOPE", "leaves"),
    ])
    def test_rejects(self, field, value):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, **{field: value})

    def test_experiment_checks(self, settings):
        settings.validate_for_experiments()
        bad = Settings(_env_file=None, SL_NODE_BUDGET=10)
        with pytest.raises(ValueError, match="SL_NODE_BUDGET"):
            bad.validate_for_experiments()

    def test_resolve_output(self, settings, tmp_path):
        assert settings.resolve_output("a.csv") == settings.REPORTS_DIR / "a.csv"
        assert settings.REPORTS_DIR.is_dir()
        nested = tmp_path / "x" / "b.json"
        assert settings.resolve_output(str(nested)) == nested

    def test_log_to_file_creates_directories(self, tmp_path):
        s = Settings(_env_file=None, REPORTS_DIR=tmp_path / "r", LOGS_DIR=tmp_path / "l", LOG_TO_FILE=True)
        assert s.LOGS_DIR.is_dir()


class TestLogging:
    def test_console_goes_to_stderr(self, settings, capsys):
        settings.LOG_LEVEL = "INFO"
        logger = setup_logging(settings)
        logging.getLogger('Nielsen.Test').info("hello from the toolkit")
        captured = capsys.readouterr()
        assert "hello from the toolkit" in captured.err
        assert captured.out == ""
        assert len(logger.handlers) == 1

    def test_repeated_setup_does_not_duplicate(self, settings):
        setup_logging(settings)
        assert len(setup_logging(settings).handlers) == 1

    def test_file_handler(self, settings):
        settings.LOG_TO_FILE = True
        logger = setup_logging(settings)
        logging.getLogger('Nielsen.Test').warning("to file")
        for handler in logger.handlers:
            handler.flush()
        assert "to file" in (settings.LOGS_DIR / "nielsen.log").read_text(encoding="utf-8")
        for handler in logger.handlers:
            handler.close()
        logger.handlers = []


class TestNumberHelpers:
    @pytest.mark.parametrize("text,expected", [
        ("1", Fraction(1)), ("1/2", Fraction(1, 2)), (" 0.5 ", Fraction(1, 2)), (3, Fraction(3)),
    ])
    def test_parse_fraction(self, text, expected):
        assert parse_fraction(text) == expected

    @pytest.mark.parametrize("text", ["one half", "1/0", ""])
    def test_parse_fraction_errors(self, text):
        with pytest.raises(ParseError):
            parse_fraction(text)

    def test_format_fraction(self):
        assert format_fraction(Fraction(4, 2)) == "2"
        assert format_fraction(Fraction(-2, 6)) == "-1/3"

    def test_v2(self):
        assert [v2(k) for k in (1, 2, 12, 96, 2 ** 70)] == [0, 1, 2, 5, 70]
        with pytest.raises(PreconditionError):
            v2(0)

    def test_ceil_log2(self):
        assert [ceil_log2(n) for n in (1, 2, 3, 4, 5, 1024, 1025)] == [0, 1, 2, 2, 3, 10, 11]

    def test_log2_int_huge(self):
        assert log2_int(2 ** 5000) == 5000
        assert log2_int(3 ** 3000) == pytest.approx(3000 * 1.584962500721156, rel=1e-12)

    def test_log_function(self):
        assert log_function("10")(1000) == pytest.approx(3)
        with pytest.raises(PreconditionError):
            log_function("7")


class TestAtomicWrite:
    def test_writes_and_replaces(self, tmp_path):
        target = tmp_path / "deep" / "out.csv"
        atomic_write(target, "a\n")
        atomic_write(target, "b\n")
        assert target.read_text(encoding="utf-8") == "b\n"
        assert [p.name for p in target.parent.iterdir()] == ["out.csv"]

    def test_failure_leaves_nothing(self, tmp_path, mocker):
        mocker.patch("core.utils.os.replace", side_effect=OSError("disk full"))
        with pytest.raises(OSError):
            atomic_write(tmp_path / "out.csv", "data")
        assert list(Path(tmp_path).iterdir()) == []
