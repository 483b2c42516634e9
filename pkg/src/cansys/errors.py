"""Exception hierarchy shared by the library and the command line tool.

The CLI maps these onto exit codes: input errors give 2, verification
and classification failures give 3, numerical inconclusiveness gives 4.
"""


class CansysError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputError(CansysError, ValueError):
    """Malformed, non-finite or inconsistent input."""

    exit_code = 2


class ValidationError(InputError):
    """A canonical system or boundary condition failed structural validation."""


class PreconditionError(InputError):
    """An operation was called outside the hypotheses it requires."""


class DomainError(InputError):
    """A spectral parameter lies outside the admissible half-planes."""


class ImpossibleConditionError(PreconditionError):
    """A requested kind of boundary condition cannot exist for this system.

    The request is well formed but unsatisfiable, so it counts as a
    classification failure.
    """

    exit_code = 3


class VerificationError(CansysError):
    """A structural verification (triplet, relation, classification) failed."""

    exit_code = 3

    def __init__(self, message, clause=None, report=None):
        super().__init__(message)
        self.clause = clause
        self.report = report


class InternalConsistencyError(VerificationError):
    """Two independent computations of the same quantity disagree."""


class NumericalError(CansysError):
    """The numerics could not reach a trustworthy answer."""

    exit_code = 4


class InconclusiveError(NumericalError):
    """A tolerance-driven decision could not be made with confidence."""


class StiffnessError(NumericalError):
    """The adaptive integrator underflowed its step size."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t
