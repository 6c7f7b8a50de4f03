"""Exception hierarchy shared by all ordlab modules."""

from __future__ import annotations


class OrdlabError(Exception):
    """Base class for every error raised by the package."""


class UsageError(OrdlabError):
    pass


class OutOfRange(OrdlabError, IndexError):
    pass


class OracleLimitExceeded(OrdlabError):
    pass


class InvalidFamilyParams(OrdlabError, ValueError):
    pass


class ParseError(OrdlabError, ValueError):
    pass


class CycleError(OrdlabError, ValueError):
    pass


class EmptyInput(OrdlabError, ValueError):
    pass


class NotAChain(OrdlabError, ValueError):
    pass


class NotAscending(OrdlabError, ValueError):
    pass


class NotLinear(OrdlabError, ValueError):
    pass


class InvalidChainIndex(OrdlabError, IndexError):
    pass


class NoCounterexamplesInWindow(OrdlabError):
    pass


class PromiseViolated(OrdlabError):
    """A caller-supplied structural promise turned out to be false."""

    def __init__(self, message: str, witness: list[int]):
        super().__init__(message)
        self.witness = list(witness)


class WidthPromiseViolated(PromiseViolated):
    pass


class HeightPromiseViolated(PromiseViolated):
    pass


class AntichainBoundExceeded(PromiseViolated):
    pass


class StabilityViolated(OrdlabError):
    def __init__(self, x: int, changes: int):
        super().__init__(f"row {x} changes color {changes} times")
        self.x = x
        self.changes = changes


class HypothesisViolated(OrdlabError):
    pass


class SeedNotAscending(OrdlabError, ValueError):
    pass


class BudgetTooSmall(OrdlabError):
    pass


class NoAscendingSequenceFound(OrdlabError):
    pass


class NotTwoChains(OrdlabError, ValueError):
    pass


class WindowTooSmall(OrdlabError):
    pass


class DomainExceeded(OrdlabError, IndexError):
    pass


class NotInjective(OrdlabError, ValueError):
    def __init__(self, a: int, b: int):
        super().__init__(f"f({a}) == f({b})")
        self.pair = (a, b)


class NoTotalIndex(OrdlabError, ValueError):
    pass


class NotTrueNumber(OrdlabError, ValueError):
    def __init__(self, n: int, witness: int):
        super().__init__(f"{n} is false: f({witness}) < f({n})")
        self.n = n
        self.witness = witness


class NotBadSequence(OrdlabError, ValueError):
    def __init__(self, i: int, j: int):
        super().__init__(f"positions {i} < {j} form a good pair")
        self.pair = (i, j)


class NoDeepPath(OrdlabError):
    pass
