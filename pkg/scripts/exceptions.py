"""
Workbench Exceptions
====================
Error hierarchy shared by every package. The CLI maps the three families
(config, ingestion, numerical) onto exit codes 2, 3 and 4.
"""

from typing import Any, Dict, Optional


class VsiError(Exception):
    """Base class for all workbench errors"""


class ConfigError(VsiError, ValueError):
    """Invalid or inconsistent configuration entry"""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        location = ""
        if key:
            location += f" [key: {key}]"
        if line is not None:
            location += f" [line: {line}]"
        super().__init__(f"{message}{location}")


class IngestionError(VsiError):
    """Dataset does not match the expected schema"""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        column: Optional[str] = None,
        row: Optional[int] = None
    ):
        self.path = path
        self.column = column
        self.row = row
        parts = [message]
        if path:
            parts.append(f"file={path}")
        if column:
            parts.append(f"column={column}")
        if row is not None:
            parts.append(f"row={row}")
        super().__init__(" | ".join(parts))


class NumericalError(VsiError):
    """Numerical failure during simulation or inversion"""


class DomainError(NumericalError, ValueError):
    """Input lies outside the physical domain of a formula"""


class DegenerateDataError(NumericalError):
    """Data cannot determine the requested parameters"""


class OutOfRangeError(NumericalError):
    """Requested inversion has no real solution"""


class NoOnsetDetectedError(NumericalError):
    """No Stark-shift onset could be located in a voltage sweep"""


class FitFailedError(NumericalError):
    """Iterative fit did not converge"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)
