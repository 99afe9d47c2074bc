"""
Exception hierarchy.
Library code raises these; only the CLI turns them into exit codes.
"""
from typing import Optional, Sequence


class GraspKitError(ValueError):
    """Base class for user-input errors (CLI exit code 2)."""


class ConfigError(GraspKitError):
    """Configuration value outside its valid range."""


class DimensionMismatchError(GraspKitError):
    """Array shapes or coefficient lengths disagree."""


class OutOfBoundsError(GraspKitError):
    """One or more grasp centers lie outside the image canvas."""

    def __init__(self, message: str, offending: Sequence = ()):
        self.offending = list(offending)
        if self.offending:
            listed = ", ".join(f"({g.x:.1f}, {g.y:.1f})" for g in self.offending[:10])
            more = f" and {len(self.offending) - 10} more" if len(self.offending) > 10 else ""
            message = f"{message}: {listed}{more}"
        super().__init__(message)


class ParseError(GraspKitError):
    """Malformed annotation text."""

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where = f"{source}:"
        if line is not None:
            where = f"{where}{line}:"
        super().__init__(f"{where} {message}" if where else message)


class SchemaError(GraspKitError):
    """JSON-lines record does not match the scene schema."""

    def __init__(self, message: str, line: Optional[int] = None, path: str = ""):
        self.line = line
        self.path = path
        prefix = f"line {line}: " if line is not None else ""
        field = f"{path}: " if path else ""
        super().__init__(f"{prefix}{field}{message}")


class TensorFormatError(GraspKitError):
    """GKT1 tensor bytes are invalid."""


class SceneMismatchError(GraspKitError):
    """Prediction and ground-truth scene ids do not align."""
