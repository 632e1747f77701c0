"""Exception hierarchy.

Every error carries a stable machine-readable ``code`` so the CLI can emit
structured error objects and map classes to exit codes (validation errors
exit 2, precondition errors exit 3, numerical failures exit 4).
"""


class CommatError(Exception):
    """Base class for all library errors."""

    code = "error"
    exit_code = 4

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def to_json_dict(self) -> dict:
        return {"code": self.code, "message": str(self), "details": self.details}


class ValidationError(CommatError):
    """Input object violates a structural invariant."""

    code = "validation-error"
    exit_code = 2


class InvalidDimensionError(ValidationError):
    code = "invalid-dimension"


class NotAStateError(ValidationError):
    code = "not-a-state"

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message, min_eigenvalue=min_eigenvalue)
        self.min_eigenvalue = min_eigenvalue


class InvalidOperatorError(ValidationError):
    code = "invalid-operator"


class PovmError(ValidationError):
    code = "invalid-povm"


class InvalidChannelError(ValidationError):
    code = "invalid-channel"


class DimensionMismatchError(ValidationError):
    code = "dimension-mismatch"


class ArityError(ValidationError):
    code = "arity-mismatch"


class CommMatrixError(ValidationError):
    code = "invalid-comm-matrix"


class ParseError(ValidationError):
    code = "parse-error"


class PreconditionError(CommatError):
    """A documented precondition of an operation does not hold."""

    code = "precondition-error"
    exit_code = 3


class FrameDeficientError(PreconditionError):
    code = "frame-deficient"


class InsufficientStatesError(PreconditionError):
    code = "insufficient-states"


class NotSelfTestableError(PreconditionError):
    code = "not-self-testable"


class NotInformationallyCompleteError(PreconditionError):
    code = "not-informationally-complete"


class NoWitnessExistsError(PreconditionError):
    code = "no-witness-exists"


class BadReferenceError(PreconditionError):
    code = "bad-reference"


class AmbiguityError(PreconditionError):
    code = "ambiguous-claim"


class DimensionViolationError(PreconditionError):
    code = "dimension-violation"


class InconsistentDimensionClaimError(PreconditionError):
    code = "inconsistent-dimension-claim"


class UnknownFixtureError(PreconditionError):
    code = "unknown-fixture"
