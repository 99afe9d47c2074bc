"""
Logging configuration utilities.
"""
import json
import logging
import os

LOG_ENV = "GRASPKIT_LOG"

_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class JsonFormatter(logging.Formatter):
    """JSON format for log aggregation."""

    def format(self, record: logging.LogRecord) -> str:
        log_obj = {
            "level": record.levelname,
            "msg": record.getMessage(),
        }
        if record.name:
            log_obj["logger"] = record.name
        if hasattr(record, "scene_id"):
            log_obj["scene_id"] = record.scene_id
        if hasattr(record, "command"):
            log_obj["command"] = record.command
        if record.exc_info:
            log_obj["exc"] = self.formatException(record.exc_info)
        return json.dumps(log_obj, ensure_ascii=False)


def get_log_level() -> int:
    """Read level from GRASPKIT_LOG (info by default)."""
    raw = os.environ.get(LOG_ENV, "info").strip().lower()
    level = _LEVELS.get(raw)
    if level is None:
        logging.getLogger(__name__).warning(f"{LOG_ENV}={raw!r} not one of {sorted(_LEVELS)}, using info")
        return logging.INFO
    return level


def setup_logging(level: int = logging.INFO) -> None:
    """Configure root logging for the application. Logs go to stderr."""
    for h in logging.root.handlers[:]:
        logging.root.removeHandler(h)
    handler = logging.StreamHandler()
    if os.environ.get("LOG_FORMAT", "default") == "json":
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(logging.Formatter("[%(levelname)s/%(asctime)s] %(message)s"))
    logging.root.addHandler(handler)
    logging.root.setLevel(level)
