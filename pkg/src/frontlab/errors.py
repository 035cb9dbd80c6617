"""Exception hierarchy. The CLI maps every ``FrontlabError`` to exit code 1."""


class FrontlabError(Exception):
    """Base class for domain errors raised by frontlab."""


class RegimeError(FrontlabError, ValueError):
    """Operation called with parameters outside the regime where it is defined."""


class GeometryError(FrontlabError, ValueError):
    pass


class StabilityError(FrontlabError, RuntimeError):
    """Time step violates the CFL bounds or the solution left the invariant rectangle."""


class ExtinctionError(FrontlabError, RuntimeError):
    """The invading species died out, so no invasion front exists to track."""


class WindowError(FrontlabError, ValueError):
    """Too few usable samples for a regression."""


class BracketError(FrontlabError, ValueError):
    pass


class ConvergenceError(FrontlabError, RuntimeError):
    pass


class ConstructionError(FrontlabError, ValueError):
    pass


class VerificationError(FrontlabError, AssertionError):
    """A proven property failed numerically (bug or insufficient resolution)."""


class SchemaError(FrontlabError, ValueError):
    """A result file does not match the schema expected by the requested plot."""
