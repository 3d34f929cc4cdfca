# Exceptions shared by every module

import json


class EBMError(Exception):
    """Base error. `code` is the machine-readable name, `exit_code` the CLI status."""

    exit_code = 2

    def __init__(self, message: str = "", details=None):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.details = details

    @property
    def code(self) -> str:
        return self.__class__.__name__

    def to_json(self) -> str:
        payload = {"error": self.code, "message": self.message}
        if self.details is not None:
            payload["details"] = self.details
        return json.dumps(payload, sort_keys=True)


# --- numerics ---
class NonSymmetric(EBMError):
    pass

class NoConvergence(EBMError):
    exit_code = 3

class DegenerateLeadingCoefficient(EBMError):
    pass

class NoSignChange(EBMError):
    pass


# --- input / model ---
class InputError(EBMError):
    pass

class OutputError(EBMError):
    pass

class UsageError(EBMError):
    exit_code = 64

class InvalidModel(EBMError):
    def __init__(self, violations: list):
        super().__init__("invalid model: " + "; ".join(violations), details=list(violations))
        self.violations = list(violations)


# --- relaxation ---
class NegativeTime(EBMError):
    pass

class NonUniformGrid(EBMError):
    pass

class NonzeroInitialStrain(EBMError):
    pass


# --- ball modes ---
class BracketFailure(EBMError):
    pass

class OutsideDomain(EBMError):
    pass


# --- spectrum ---
class OrderingViolation(EBMError):
    pass

class CrossCheckFailure(EBMError):
    pass

class DegenerateStrengths(EBMError):
    pass

class StepTooLarge(EBMError):
    pass


# --- inversion ---
class InversionError(EBMError):
    exit_code = 3

class InconsistentClusters(InversionError):
    pass

class ComplexBeta(InversionError):
    pass

class NonPositiveAlpha(InversionError):
    pass

class NegativeModulus(InversionError):
    pass

class RatioInconsistent(InversionError):
    pass

class IllConditioned(InversionError):
    pass


def as_ebm_error(e: Exception) -> EBMError:
    """EBMError for any failure a command can hit; OS errors on output files become OutputError."""
    if isinstance(e, EBMError):
        return e
    if isinstance(e, OSError):
        return OutputError(f"{e.strerror or e}: {e.filename}", {"path": e.filename})
    return EBMError(f"{type(e).__name__}: {e}")
