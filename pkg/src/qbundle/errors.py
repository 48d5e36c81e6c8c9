"""Exception hierarchy.

Every error raised on purpose by the toolkit derives from ``QBundleError`` and
carries a short machine-readable ``code`` (the class name) plus free-form
details, which is what the CLI serializes on stderr.
"""


class QBundleError(Exception):
    """Base class; ``details`` is a JSON-friendly dict."""

    def __init__(self, message="", **details):
        super().__init__(message or type(self).__name__)
        self.details = details

    @property
    def code(self):
        return type(self).__name__

    def to_json(self):
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = self.details
        return out


class ValidationError(QBundleError):
    """Input is well-formed but mathematically invalid (CLI exit code 2)."""


# fields
class CharTwo(ValidationError):
    pass


class NotPrime(ValidationError):
    pass


class ReducibleModulus(ValidationError):
    pass


class InfiniteField(ValidationError):
    pass


class FieldSpecError(ValidationError):
    pass


# polynomials
class PolySyntaxError(ValidationError):
    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}", pos=pos)
        self.pos = pos


class UnknownVariable(ValidationError):
    pass


class NegativeExponent(ValidationError):
    pass


class VarSpecMismatch(ValidationError):
    pass


class NonSquare(ValidationError):
    pass


class NotXOnly(ValidationError):
    pass


class NotSupported(QBundleError):
    pass


# bundles
class DegreeIncompatible(ValidationError):
    pass


class NotHomogeneous(ValidationError):
    pass


class DegenerateForm(ValidationError):
    pass


class WeightsUnsorted(ValidationError):
    pass


class BadShape(ValidationError):
    pass


class SliceTooDeep(ValidationError):
    pass


class DegenerateLine(ValidationError):
    pass


# transform
class DegreeTooSmall(ValidationError):
    pass


class ZeroVector(ValidationError):
    pass


class IndeterminacyLocus(ValidationError):
    pass


class FirstCoordinateZero(ValidationError):
    pass


class NotOnVariety(ValidationError):
    pass


class SingularCenter(ValidationError):
    pass


# search / certify
class BudgetExceeded(QBundleError):
    pass


class CertifiedEmpty(QBundleError):
    """A full finite-field scan found nothing."""


class DegenerateTail(ValidationError):
    pass


class WrongShape(ValidationError):
    pass


class HybridMismatch(QBundleError):
    """Formula and brute-force counts disagree."""
