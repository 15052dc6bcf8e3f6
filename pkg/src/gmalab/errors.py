"""Exception hierarchy.

Violations of a theorem's *hypotheses* are never raised; they are report
entries.  These exceptions signal malformed input or exhausted budgets.
"""


class GmaLabError(Exception):
    pass


# ring_core
class AlgebraError(GmaLabError, ValueError):
    pass


class NotAssociative(AlgebraError):
    pass


class NotCommutative(AlgebraError):
    pass


class NoUnit(AlgebraError):
    pass


class NotLocal(AlgebraError):
    pass


class MismatchedParent(AlgebraError):
    pass


# group_rep
class NotAGroup(GmaLabError, ValueError):
    pass


class ClosureTooLarge(GmaLabError):
    pass


class RelationViolated(GmaLabError, ValueError):
    pass


class NonInvertibleImage(GmaLabError, ValueError):
    pass


class NotAField(GmaLabError, ValueError):
    pass


class InvalidOrderTwoElement(GmaLabError, ValueError):
    pass


class NotACocycle(GmaLabError, ValueError):
    pass


# pseudochar
class NoConvergence(GmaLabError):
    pass


class NotResidualIdempotent(GmaLabError, ValueError):
    pass


class TooLargeForExhaustion(GmaLabError):
    pass


class NotSelfDual(GmaLabError, ValueError):
    pass


class CornersNotCyclic(GmaLabError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


# cohomology
class BudgetExceeded(GmaLabError):
    pass


# criterion
class NotSurjective(GmaLabError, ValueError):
    pass


class NotAlgebraHom(GmaLabError, ValueError):
    pass


class DiagramNotCommuting(GmaLabError, ValueError):
    pass


# cli
class UnknownDemo(GmaLabError, KeyError):
    pass


class ScenarioError(GmaLabError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
