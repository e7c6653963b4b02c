"""Exception hierarchy shared across the toolkit."""


class MagflowError(Exception):
    """Base class for all toolkit errors."""


class ContractViolationError(MagflowError):
    """An operation was called with inputs violating its preconditions."""


class SingularInertiaError(MagflowError):
    """The inertia operator is not invertible on some retained mode."""

    def __init__(self, mode, message=None):
        self.mode = mode
        super().__init__(message or f"singular inertia symbol at mode {mode}")


class NonInvertibleModeError(MagflowError):
    """An elliptic solve was requested on a mode outside the operator's range."""


class DivergenceError(MagflowError):
    """A trajectory produced non-finite values.

    Carries the last finite state and the time at which it was recorded so
    that callers can report how far the integration got.
    """

    def __init__(self, stage, t=None, last_state=None):
        self.stage = stage
        self.t = t
        self.last_state = last_state
        msg = f"non-finite values in {stage}"
        if t is not None:
            msg += f" (last finite state at t={t:.6g})"
        super().__init__(msg)


class UnsupportedSchemeError(MagflowError):
    """The requested time-stepping scheme is not available for this system."""


class ConfigError(MagflowError):
    """A run configuration file is missing, malformed, or violates the schema.

    ``kind`` is one of ``missing-file``, ``syntax``, ``unknown-key``,
    ``schema``; ``key`` names the offending key when applicable, so callers
    can react to the failure without parsing the message.
    """

    def __init__(self, message, kind="schema", key=None):
        self.kind = kind
        self.key = key
        super().__init__(message)
