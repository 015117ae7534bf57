"""
Exception hierarchy shared by the computational services
"""


class WorkbenchError(Exception):
    """Base class for every failure raised by the services"""


class InvalidInputError(WorkbenchError, ValueError):
    """Caller passed something outside an operation's domain"""


class ConsistencyError(WorkbenchError, RuntimeError):
    """An internal invariant failed (d^2 != 0, non-regular poset, ...)"""


class UnsupportedError(WorkbenchError):
    """Operation is well defined in principle but not implemented for this input"""


class HypothesisError(WorkbenchError):
    """A theorem's hypothesis does not hold, so the requested shortcut is refused"""


class ResourceLimitError(WorkbenchError):
    """Input exceeds the configured desk-scale bound"""
