"""Shared exception types."""

from __future__ import annotations


class NumericalError(RuntimeError):
    """An iterative computation failed to converge; may carry partial results."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
