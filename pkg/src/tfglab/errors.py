"""Error taxonomy shared by all workbench modules.

The CLI maps these onto exit codes (see cli.py): precondition and
construction failures are usage errors, budget exhaustion is its own code,
and internal-consistency or certificate failures signal that a property
which should hold by theorem was observed to fail.
"""


class TfgLabError(Exception):
    """Base class for workbench errors."""


class PreconditionError(TfgLabError, ValueError):
    """An operation was invoked outside its stated preconditions."""


class ConstructionError(PreconditionError):
    """Constructor input cannot define the requested object."""


class BudgetError(TfgLabError):
    """A configured budget (window length, ball size, level count) ran out.

    ``partial`` optionally carries whatever was computed before exhaustion.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InexactResult(TfgLabError):
    """A value could not be certified exact.

    ``value`` is the best certified lower bound; ``payload`` may carry a
    richer partial result (e.g. a table of flagged rows).
    """

    def __init__(self, message, value=None, payload=None):
        super().__init__(message)
        self.value = value
        self.payload = payload


class InternalConsistencyError(TfgLabError):
    """A theorem-guaranteed property failed: a bug or invalid input upstream."""


class CertificateError(TfgLabError):
    """A verification gate failed.  ``witnesses`` lists concrete failures."""

    def __init__(self, message, witnesses=None):
        super().__init__(message)
        self.witnesses = witnesses or []
