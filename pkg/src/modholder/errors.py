"""Exception types raised across the package."""


class ModHolderError(ValueError):
    """Base class for all input and contract errors."""


class NotHermitian(ModHolderError):
    pass


class NotPSD(ModHolderError):
    pass


class SingularNegativePower(ModHolderError):
    pass


class FaithfulnessViolated(ModHolderError):
    pass


class DimMismatch(ModHolderError):
    pass


class EmptySample(ModHolderError):
    pass


class BadExponent(ModHolderError):
    pass


class SupportRequired(ModHolderError):
    pass


class BudgetViolation(ModHolderError):
    pass


class OddP(ModHolderError):
    pass


class ExponentMismatch(ModHolderError):
    pass


class ZeroRealPart(ModHolderError):
    pass


class InvalidSplit(ModHolderError):
    pass


class SingularState(ModHolderError):
    pass


class SizeTooLarge(ModHolderError):
    pass


class InfeasibleFloor(ModHolderError):
    pass


class ImaginaryResidue(ModHolderError):
    """A quantity that must be real came out with a significant imaginary part."""


class InconsistentEvaluation(ModHolderError):
    """Two independent evaluation routes of the same quantity disagree."""


class ConfigError(ModHolderError):
    pass
