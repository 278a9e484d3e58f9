"""
Exception hierarchy for clocknet.

Every error carries an ``exit_code`` and a human readable ``detail`` so the
command line routes can report failures the same way for every command.
"""

from typing import Optional


class ClockNetError(Exception):
    exit_code: int = 2

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class ConfigError(ClockNetError):
    exit_code = 1


class DomainError(ClockNetError):
    """Physical parameters outside the model's domain (e.g. a node inside the horizon)."""


class ProtocolError(ClockNetError):
    """Circuit precondition violated: wrong sites, sectors or consumed resources."""


class MeasurementError(ClockNetError):
    """Measurement basis or projector set is not valid."""


class ResourceLimitError(ClockNetError):
    pass


class TraceFormatError(ClockNetError):
    def __init__(self, detail: str, line: Optional[int] = None):
        if line is not None:
            detail = f"line {line}: {detail}"
        super().__init__(detail)
        self.line = line


class AcceptanceError(ClockNetError):
    exit_code = 3
