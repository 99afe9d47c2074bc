"""Utils module - logging, metrics and timing helpers."""
from .logging import get_log_level, setup_logging
from .metrics import get_metrics
from .timing import timed

__all__ = ['get_log_level', 'setup_logging', 'get_metrics', 'timed']
