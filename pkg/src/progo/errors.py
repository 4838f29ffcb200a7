"""Exception types raised across the package."""

from __future__ import annotations


class ProgoError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(ProgoError, ValueError):
    pass


class InvalidDomainError(ProgoError, ValueError):
    pass


class UnsupportedDimensionError(ProgoError, ValueError):
    pass


class EvaluationError(ProgoError, ArithmeticError):
    """Objective or target returned a value that cannot be used (NaN, inf, f <= 0 under log)."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class InvalidStartError(ProgoError, ValueError):
    """Chain start point has zero target density."""


class ShrinkageError(ProgoError, AssertionError):
    """Shrink precondition violated; indicates a sampler bug."""


class NonTerminationError(ProgoError, RuntimeError):
    """Shrinkage exhausted its step budget without accepting a proposal."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ScheduleOverflowError(ProgoError, OverflowError):
    pass


class OptimizationAborted(ProgoError, RuntimeError):
    """A stage failed; ``record`` holds every stage completed before the failure."""

    def __init__(self, message, record=None, cause=None):
        super().__init__(message)
        self.record = record
        self.cause = cause
