"""Exceptions and advisory warnings raised by symtanh."""

from __future__ import annotations


class SymtanhError(ValueError):
    pass


class OrderTooHigh(SymtanhError):
    """Requested moment order exceeds the cancellation-safe limit."""


class OrderUnavailable(SymtanhError):
    """A test function lacks the derivative order a computation needs."""


class DomainError(SymtanhError):
    pass


class InsufficientData(SymtanhError):
    """Fewer than three usable rows were supplied to a rate fit."""


class Advisory(UserWarning):
    """Non-fatal numerical advisory. The CLI escalates these under ``--strict``."""


class RadiusCapped(Advisory):
    pass


class WindowTooSmall(Advisory):
    pass
