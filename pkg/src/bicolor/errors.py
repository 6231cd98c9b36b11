"""Error taxonomy.

Input/validation errors map to CLI exit code 1; invariant breaches (a
verification that should be impossible to fail, or an exhausted exact-search
budget) map to exit code 2.  The class name doubles as the stable machine
readable error code in JSON reports.
"""


class WorkbenchError(Exception):
    @property
    def code(self) -> str:
        return type(self).__name__


class InputError(WorkbenchError):
    """Bad input, schema violation, or unmet operation precondition."""


class InvariantError(WorkbenchError):
    """A postcondition or internal cross-check failed; signals a bug."""


class SchemaError(InputError):
    pass


class UnknownElement(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class BackendMismatch(InputError):
    pass


class AlphaMismatch(InputError):
    pass


class NotInKPlus(InputError):
    pass


class RationalAlpha(InputError):
    pass


class IrrationalAlpha(InputError):
    pass


class AlphaOne(InputError):
    pass


class BadEpsilon(InputError):
    pass


class EpsilonUndefined(InputError):
    pass


class FreeBackendUnsupported(InputError):
    pass


class NotIndependent(InputError):
    pass


class NotClosed(InputError):
    pass


class NotTranscendental(InputError):
    pass


class GapTooSmall(InputError):
    pass


class FamilyTooSmall(InputError):
    pass


class MatchInvalid(InputError):
    pass


class BudgetExceeded(InputError):
    pass


class SearchBudgetExceeded(InvariantError):
    """An exact exhaustive search outgrew its node budget."""
