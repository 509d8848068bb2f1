"""
Unit tests for JSON logging setup
"""

import io
import json
import pytest

from src.logger import LOG_LEVEL_ENV, get_logger, resolve_log_level, setup_logging


def test_json_records():
    """Test records are JSON with level, logger and module fields"""
    stream = io.StringIO()
    setup_logging("DEBUG", stream=stream)
    get_logger("src.poly").info("reduced basis")

    record = json.loads(stream.getvalue().splitlines()[-1])
    assert record["message"] == "reduced basis"
    assert record["level"] == "INFO"
    assert record["logger"] == "src.poly"
    assert "timestamp" in record


def test_level_filters(monkeypatch):
    """Test records below the configured level are dropped"""
    monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)
    stream = io.StringIO()
    setup_logging("WARNING", stream=stream)
    get_logger("src.quotient").info("hidden")
    assert stream.getvalue() == ""


def test_environment_override(monkeypatch):
    """Test the environment variable wins over the configured level"""
    monkeypatch.setenv(LOG_LEVEL_ENV, "error")
    assert resolve_log_level("DEBUG") == "ERROR"


def test_unknown_level(monkeypatch):
    """Test a bogus level is rejected"""
    monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)
    with pytest.raises(ValueError):
        setup_logging("CHATTY")


def test_log_file(tmp_path, monkeypatch):
    """Test the optional file handler creates its directory"""
    monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)
    path = tmp_path / "logs" / "run.log"
    logger = setup_logging("INFO", log_file=str(path), stream=io.StringIO())
    get_logger("src.stability").info("chart certified")
    for handler in logger.handlers:
        handler.flush()
    assert json.loads(path.read_text().splitlines()[-1])["message"] == "chart certified"
