"""Exception hierarchy shared by every module."""


class AlephError(Exception):
    pass


class ValidationError(AlephError, ValueError):
    """Input violates a structural precondition (exit code 2 in the CLI)."""


class UndecidableQuery(AlephError):
    """A symbolic prime-set question falls outside the decidable fragment."""


class StabilizationError(AlephError):
    """Level ranks did not stabilize within the configured truncation."""


class Cancelled(AlephError):
    pass


class TheoremViolation(AlephError, AssertionError):
    """A runtime assertion that the underlying theorem guarantees has failed.

    Seeing this means either a bug here or a defect in the mathematics; the CLI
    maps it to exit code 3.
    """


def check_cancel(cancel) -> None:
    if cancel is not None and cancel.is_set():
        raise Cancelled("search cancelled by caller")
