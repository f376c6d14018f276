"""Exception hierarchy shared by every eisgen module."""

from typing import Any


class EisgenError(Exception):
    """Base exception for eisgen."""


class InputError(EisgenError, ValueError):
    """Exception when the caller supplied unusable input."""


class CheckFailed(EisgenError):
    """Exception when an exact verification does not hold."""

    def __init__(self, message: str, witness: Any = None) -> None:
        """Keep the witness around for the failure report."""
        super().__init__(message)
        self.witness = witness

    def report(self) -> dict[str, Any]:
        """JSON friendly description of the failure."""
        return {
            "error": type(self).__name__,
            "message": str(self),
            "witness": self.witness if self.witness is None else str(self.witness),
        }
