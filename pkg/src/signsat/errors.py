"""Exception hierarchy shared by every module.

Each class carries a stable ``code`` used by the command-line front end as
its process exit status.
"""


class SignSatError(Exception):
    """Base class for all errors raised by :mod:`signsat`."""

    code = 1


class DomainError(SignSatError, ValueError):
    """An argument lies outside the domain of a function (e.g. non-finite)."""


class PreconditionError(SignSatError, ValueError):
    """A documented precondition on the arguments does not hold."""


class InvalidLinkError(SignSatError, ValueError):
    """A link function is not strictly increasing where it was evaluated."""


class UnclassifiableLinkError(SignSatError, ValueError):
    """A custom link was used where a declared period class is required."""


class MissingWindowError(PreconditionError):
    """A non-periodic link needs an explicit evaluation window."""


class DegenerateDataError(SignSatError, ValueError):
    """The sample carries no information (e.g. every ``d_i`` is zero)."""

    code = 3


class CapacityError(SignSatError, RuntimeError):
    """The exact method was asked to handle a problem above its size cap."""

    code = 4


class InternalInconsistencyError(SignSatError, RuntimeError):
    """A constructed certificate failed its own verification."""


class ConfigError(SignSatError, ValueError):
    """A run configuration failed to parse or validate."""

    code = 2

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where = f"{where}{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)
