"""Exception hierarchy.

Exit-code mapping used by the CLI: usage errors exit 2, resource and
budget errors exit 3, invariant or verification failures exit 4.
"""


class RuinLabError(Exception):
    """Base class for all package errors."""


class BudgetError(RuinLabError):
    """A configured resource budget was exhausted before completion."""


class ExponentCapExceeded(BudgetError):
    """A dyadic exponent left the configured safe range.

    Raised instead of silently producing astronomically scaled numbers,
    which in practice means a runaway recursion or pathological horizon.
    """


class BreakpointBudgetExceeded(BudgetError):
    """Step-function refinement exceeded the piece budget."""


class MemoBudgetExceeded(BudgetError):
    """Pointwise or polynomial memo table exceeded its entry budget."""


class BlockCapExceeded(BudgetError):
    """A block boundary was not reached within the per-block step cap."""


class NonConvergent(BudgetError):
    """Plateau estimation hit its depth cap before the gap went below
    tolerance. Expected behaviour for p close to 1/2."""


class AmbiguousDigit(RuinLabError):
    """The sampled digit could not be resolved within the extension cap.

    Carries no payload; callers count and discard ambiguous samples.
    """


class DegenerateSlope(RuinLabError):
    """1 - f is zero at working precision, so a log slope is undefined."""


class InvalidStepFunction(RuinLabError):
    """A step function violated its structural invariants."""


class CacheVersionError(RuinLabError):
    """A cache entry was written with an incompatible schema version."""


class CacheCorruptError(RuinLabError):
    """A cache entry could not be parsed."""


class VerificationFailed(RuinLabError):
    """A pathwise identity check failed."""
