"""Exception hierarchy. Every error carries a stable ``code`` used in JSON reports."""


class PadlabError(Exception):
    code = "Error"

    def __init__(self, message="", **data):
        super().__init__(message or self.code)
        self.data = data

    def to_json(self):
        out = {"error": self.code, "message": str(self)}
        for key, value in self.data.items():
            out[key] = value
        return out


def _error(name, base=PadlabError):
    return type(name, (base,), {"code": name})


# field construction and arithmetic
NonPrime = _error("NonPrime")
NotIrreducibleModP = _error("NotIrreducibleModP")
NotEisenstein = _error("NotEisenstein")
PrecisionTooSmall = _error("PrecisionTooSmall")
PrecisionExhausted = _error("PrecisionExhausted")
NegativeValuationResidue = _error("NegativeValuationResidue")
ContextMismatch = _error("ContextMismatch")
LiteralError = _error("LiteralError")


class DivideByZero(PadlabError, ZeroDivisionError):
    code = "DivideByZero"


# power classes
ZeroInput = _error("ZeroInput")
NotInDomain = _error("NotInDomain")

# solvers
NotContracting = _error("NotContracting")
NoProgress = _error("NoProgress")
HypothesisViolated = _error("HypothesisViolated")
SingularDerivative = _error("SingularDerivative")
TargetOutsideCertifiedBall = _error("TargetOutsideCertifiedBall")

# calculus
EvaluationFailure = _error("EvaluationFailure")
InconsistentEstimates = _error("InconsistentEstimates")
CriterionFailed = _error("CriterionFailed")
NoQthPowerMap = _error("NoQthPowerMap")
ZeroDenominatorGerm = _error("ZeroDenominatorGerm")
NotAffine = _error("NotAffine")
RatioNotConverging = _error("RatioNotConverging")
ExpansionFailed = _error("ExpansionFailed")

# expressions
DomainError = _error("DomainError")


class ExprSyntaxError(PadlabError):
    """Parse failure with a 1-based position and the set of tokens that would have been accepted."""

    code = "SyntaxError"

    def __init__(self, line, col, expected, found):
        expected = sorted(set(expected))
        super().__init__(
            f"line {line}, col {col}: expected one of {', '.join(expected)}; found {found}",
            line=line, col=col, expected=expected, found=found,
        )
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found


# group laws
IdentityAxiomFailed = _error("IdentityAxiomFailed")
AssociativityFailed = _error("AssociativityFailed")
NonIntegralCoefficient = _error("NonIntegralCoefficient")
InverseNotIntegral = _error("InverseNotIntegral")
SolverBreakdown = _error("SolverBreakdown")
RescalePreconditionFailed = _error("RescalePreconditionFailed")
LawFormatError = _error("LawFormatError")

# finite quotients
NotACongruence = _error("NotACongruence")
CarrierTooLarge = _error("CarrierTooLarge")
QuotientNotElementaryAbelian = _error("QuotientNotElementaryAbelian")
