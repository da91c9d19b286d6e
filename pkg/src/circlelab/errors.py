"""Exception hierarchy.

Every error raised on purpose by the library derives from ``CircleLabError`` so
that the CLI can map it to an exit status in one place.
"""


class CircleLabError(Exception):
    """Base class for all library errors."""


class InputError(CircleLabError):
    """Bad input data; the CLI maps these to exit status 3."""


class ClaimViolated(CircleLabError):
    """A checked mathematical claim failed; the CLI maps these to exit status 2."""


class ParseError(InputError):
    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class DegenerateTriple(InputError):
    pass


class MixedRadicals(CircleLabError):
    pass


class IdentityMap(InputError):
    pass


class WrongClass(InputError):
    pass


class BadBranch(InputError):
    pass


class UniverseMismatch(InputError):
    pass


class Undecidable(CircleLabError):
    pass


class BadWord(InputError):
    pass


class WrongInput(InputError):
    pass


class Indeterminate(CircleLabError):
    """Enclosure arithmetic could not decide a sign at the precision tried."""

    def __init__(self, message, hint=None):
        self.hint = hint
        super().__init__(message if hint is None else f"{message} ({hint})")


class SupplyError(CircleLabError):
    pass


class TraceInvalid(ClaimViolated):
    pass


class DegenerateCoincidence(InputError):
    pass


class NotElementary(ClaimViolated):
    pass


class CannotAmplify(CircleLabError):
    pass


class DependentParameters(InputError):
    pass


class BasisFailure(CircleLabError):
    pass


class BadRho(ClaimViolated):
    pass


class PrecisionUnreachable(CircleLabError):
    pass
