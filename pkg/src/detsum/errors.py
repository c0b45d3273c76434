"""Exception hierarchy shared by all detsum modules."""


class DetsumError(Exception):
    """Base class for every error raised by detsum."""


class MalformedInputError(DetsumError, ValueError):
    pass


class ElementRangeError(DetsumError, ValueError):
    pass


class WindowMismatchError(DetsumError, ValueError):
    pass


class WindowOverflowError(DetsumError, MemoryError):
    """A bitmap or profile window would exceed the configured memory cap."""


class SizeLimitError(DetsumError, ValueError):
    pass


class NotAMemberError(DetsumError, KeyError):
    pass


class NoWitnessError(NotAMemberError):
    pass


class NotInAnswerError(NotAMemberError):
    pass


class WitnessModeOffError(DetsumError, RuntimeError):
    pass


class ContractViolation(DetsumError, AssertionError):
    """An internal invariant failed; results must not be trusted."""


class DiscrepancyBoundError(ContractViolation):
    pass
