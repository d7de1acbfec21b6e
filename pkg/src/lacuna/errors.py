"""Exception hierarchy. Everything raised on purpose derives from LacunaError."""


class LacunaError(Exception):
    pass


class EmptySequence(LacunaError):
    pass


class NotIncreasing(LacunaError):
    pass


class RatioViolation(LacunaError):
    def __init__(self, j, message=None):
        self.j = j
        super().__init__(message or f"ratio condition fails at index {j}")


class DeltaTooLarge(LacunaError):
    pass


class EmptySet(LacunaError):
    pass


class MTooSmall(LacunaError):
    pass


class ConstantsInfeasible(LacunaError):
    pass


class EmptySurvivor(LacunaError):
    pass


class BoundViolated(LacunaError):
    """The survivor measure fell below the local-lemma product bound."""


class CapExceeded(LacunaError):
    pass


class RatioNotAboveFour(LacunaError):
    pass


class TooLarge(LacunaError):
    pass


class WindowTooLarge(LacunaError):
    pass


class MaskTooWide(LacunaError):
    pass


class PeriodTooSmall(LacunaError):
    pass


class GridTooCoarse(LacunaError):
    pass


class LPInfeasible(LacunaError):
    pass
