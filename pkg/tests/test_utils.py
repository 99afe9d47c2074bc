"""Tests for logging, metrics and timing helpers."""
import json
import logging

from utils.logging import JsonFormatter, get_log_level
from utils.metrics import get_metrics
from utils.timing import timed


def test_log_level_from_env(monkeypatch):
    monkeypatch.setenv("GRASPKIT_LOG", "debug")
    assert get_log_level() == logging.DEBUG
    monkeypatch.setenv("GRASPKIT_LOG", "warn")
    assert get_log_level() == logging.WARNING
    monkeypatch.delenv("GRASPKIT_LOG")
    assert get_log_level() == logging.INFO


def test_unknown_log_level_falls_back(monkeypatch, caplog):
    monkeypatch.setenv("GRASPKIT_LOG", "loud")
    with caplog.at_level(logging.WARNING):
        assert get_log_level() == logging.INFO
    assert "GRASPKIT_LOG" in caplog.text


def test_json_formatter_extras():
    record = logging.LogRecord("graspkit", logging.INFO, __file__, 1, "scene %s done", ("a",), None)
    record.scene_id = "a"
    record.command = "infer"
    payload = json.loads(JsonFormatter().format(record))
    assert payload == {"level": "INFO", "msg": "scene a done", "logger": "graspkit",
                       "scene_id": "a", "command": "infer"}


def test_metrics_reset_and_log(caplog):
    metrics = get_metrics()
    metrics.reset()
    metrics.scenes_read += 3
    with caplog.at_level(logging.INFO):
        metrics.log()
    assert "scenes_read=3" in caplog.text
    metrics.reset()
    assert metrics.scenes_read == 0


def test_timed_exposes_elapsed():
    with timed("noop") as elapsed:
        sum(range(1000))
    assert elapsed.ms >= 0
