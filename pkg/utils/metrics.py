"""
Simple in-memory metrics for observability.
Logged once at the end of every CLI command.
"""
import logging
from dataclasses import dataclass, fields

logger = logging.getLogger(__name__)


@dataclass
class Metrics:
    """Pipeline counters."""

    scenes_read: int = 0
    scenes_written: int = 0
    grasps_encoded: int = 0
    detections_in: int = 0
    detections_kept: int = 0
    grasps_decoded: int = 0

    def log(self) -> None:
        """Log aggregated metrics."""
        logger.info(
            "metrics scenes_read=%d scenes_written=%d grasps_encoded=%d "
            "detections_in=%d detections_kept=%d grasps_decoded=%d",
            self.scenes_read,
            self.scenes_written,
            self.grasps_encoded,
            self.detections_in,
            self.detections_kept,
            self.grasps_decoded,
        )

    def reset(self) -> None:
        for f in fields(self):
            setattr(self, f.name, 0)


_metrics = Metrics()


def get_metrics() -> Metrics:
    return _metrics
