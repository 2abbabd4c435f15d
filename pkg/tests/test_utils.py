"""
Tests for the report writer, the error hierarchy and logging helpers
"""

import importlib.util
import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from utils.errors import (
    CapacityError,
    ConfigurationError,
    DomainError,
    ModelError,
    NumericError,
    PolykinError,
    PositivityError,
    SingularInputError,
    StiffnessError,
    UsageError,
)
from utils.logger import ContextFilter, add_run_context, log_performance, setup_logger
from utils.report_writer import ReportWriter


def test_write_csv_uses_round_trip_floats(tmp_path):
    writer = ReportWriter(tmp_path / "out")
    path = writer.write_csv("table.csv", pd.DataFrame({"x": [0.1, 1 / 3], "n": [1, 2]}))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "x,n"
    assert float(lines[2].split(",")[0]) == 1 / 3
    assert writer.written == [path]


def test_write_records_with_columns(tmp_path):
    writer = ReportWriter(tmp_path)
    path = writer.write_records("rows.csv", [{"b": 2.0, "a": 1.0}], columns=["a", "b"])
    assert path.read_text(encoding="utf-8").splitlines()[0] == "a,b"


def test_write_json_converts_numpy_and_complex(tmp_path):
    writer = ReportWriter(tmp_path)
    path = writer.write_json("report.json", {
        "array": np.arange(3),
        "scalar": np.float64(2.5),
        "flag": np.bool_(True),
        "z": 1 + 2j,
        "path": tmp_path,
    })
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload["array"] == [0, 1, 2]
    assert payload["scalar"] == 2.5
    assert payload["flag"] is True
    assert payload["z"] == [1.0, 2.0]
    assert payload["path"] == str(tmp_path)


def test_write_series_only_with_plot_data(tmp_path):
    quiet = ReportWriter(tmp_path / "quiet")
    assert quiet.write_series("gap", [0.0, 1.0], [1.0, 2.0]) is None
    assert not (tmp_path / "quiet" / "plot_data").exists()

    loud = ReportWriter(tmp_path / "loud", emit_plot_data=True)
    path = loud.write_series("gap", [0.0, 1.0], [1.0, 2.0])
    assert path == tmp_path / "loud" / "plot_data" / "gap.csv"
    assert path.read_text(encoding="utf-8").splitlines()[0] == "x,y"


def test_atomic_write_leaves_no_temporaries(tmp_path):
    writer = ReportWriter(tmp_path)
    writer.write_json("a.json", {"x": 1})
    writer.write_json("a.json", {"x": 2})
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a.json"]
    assert json.loads((tmp_path / "a.json").read_text(encoding="utf-8")) == {"x": 2}


def test_error_hierarchy():
    for error in (DomainError, UsageError, ConfigurationError, CapacityError, NumericError):
        assert issubclass(error, PolykinError)
    for error in (ModelError, SingularInputError, StiffnessError, PositivityError):
        assert issubclass(error, NumericError)
    assert issubclass(DomainError, ValueError)


def test_numeric_error_reports_diagnostics():
    error = StiffnessError("too stiff", {"dt": 0.5, "nu_max": 4.0})
    assert error.diagnostics == {"dt": 0.5, "nu_max": 4.0}
    assert str(error) == "too stiff (dt=0.5, nu_max=4.0)"
    assert str(NumericError("plain")) == "plain"


def test_setup_logger_creates_files(tmp_path):
    logger = setup_logger("polykin.test_setup", "DEBUG", tmp_path / "logs")
    logger.info("hello")
    assert any(p.name.startswith("polykin_") for p in (tmp_path / "logs").iterdir())
    assert setup_logger("polykin.test_setup") is logger
    assert len(logger.handlers) == 3
    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)


def test_context_filter_sets_run_id():
    record = logging.LogRecord("x", logging.INFO, __file__, 1, "msg", None, None)
    assert ContextFilter("abc123", "relax").filter(record)
    assert record.run_id == "abc123"
    assert record.suite == "relax"
    ContextFilter().filter(record)
    assert record.run_id == "no-run"
    assert record.suite == "-"


def test_add_run_context_rewrites_format():
    logger = logging.getLogger("polykin.test_context")
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("%(levelname)s - %(message)s"))
    logger.addHandler(handler)
    try:
        add_run_context(logger, "feedbeef", "spectrum")
        add_run_context(logger, "cafe0001", "relax")
        assert handler.formatter._fmt == "%(levelname)s - [%(suite)s:%(run_id)s] - %(message)s"
        filters = [f for f in handler.filters if isinstance(f, ContextFilter)]
        assert len(filters) == 1
        assert filters[0].run_id == "cafe0001"
    finally:
        logger.removeHandler(handler)


def test_log_performance_passes_through():
    @log_performance
    def double(x):
        return 2 * x

    @log_performance
    def fail():
        raise UsageError("bad")

    assert double(4) == 8
    assert double.__name__ == "double"
    with pytest.raises(UsageError):
        fail()


def load_validate_setup():
    module_spec = importlib.util.spec_from_file_location(
        "validate_setup", Path(__file__).resolve().parent.parent / "scripts" / "validate_setup.py")
    module = importlib.util.module_from_spec(module_spec)
    module_spec.loader.exec_module(module)
    return module


def test_validate_setup_passes_on_defaults(capsys):
    module = load_validate_setup()
    assert all(ok for ok, _ in module.config_findings())
    assert all(ok for ok, _ in module.capacity_findings())
    [(ok, message)] = module.quadrature_findings()
    assert ok, message
    assert module.main([]) == 0
    out = capsys.readouterr().out
    assert "[ok] run file: polykin_defaults.yaml resolves for relax" in out
    assert "FAIL" not in out


def test_validate_setup_flags_capacity(monkeypatch):
    monkeypatch.setenv("POLYKIN_MAX_BASIS_SIZE", "50")
    findings = load_validate_setup().capacity_findings()
    assert [ok for ok, _ in findings] == [False, False]


def test_validate_setup_flags_bad_run_file(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("model:\n  alpha: 3.0\n", encoding="utf-8")
    module = load_validate_setup()
    [(ok, message)] = module.config_findings(path)
    assert not ok
    assert message.startswith("bad.yaml")
    assert module.main(["--config", str(path)]) == 1
