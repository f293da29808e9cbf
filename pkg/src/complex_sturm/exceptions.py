"""Exception hierarchy for complex_sturm.

All library errors derive from :class:`ComplexSturmError` so callers can
catch domain failures without swallowing programming errors.
"""

__all__ = [
    "ComplexSturmError",
    "ArgumentError",
    "ExpressionSyntaxError",
    "IndeterminateError",
    "ConvergenceError",
    "ContractionError",
    "QuadratureBudgetError",
    "DegenerateBasisError",
    "EigenvalueSearchError",
]


class ComplexSturmError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(ComplexSturmError):
    """A caller-supplied argument violates a documented precondition."""


class ExpressionSyntaxError(ArgumentError):
    """A potential expression failed to parse.

    Parameters
    ----------
    message : str
        Human-readable description of the problem.
    source : str
        The offending expression text.
    position : int
        0-based index into ``source`` where parsing failed.
    """

    def __init__(self, message, source="", position=0):
        self.source = source
        self.position = position
        pointer = ""
        if source:
            pointer = "\n  {0}\n  {1}^".format(source, " " * position)
        super().__init__("{0} (at position {1}){2}".format(message, position, pointer))


class IndeterminateError(ComplexSturmError):
    """A numerical classification could not be decided within budget.

    Carries the partial evidence that was gathered so callers (and the CLI)
    can report what was seen instead of a bare failure.

    Attributes
    ----------
    evidence : dict
        Partial sums, panel tables, or sample sequences gathered before
        giving up.
    """

    def __init__(self, message, evidence=None):
        self.evidence = evidence if evidence is not None else {}
        super().__init__(message)


class ConvergenceError(ComplexSturmError):
    """An iterative procedure failed to converge within its budget."""


class ContractionError(ConvergenceError):
    """A fixed-point window has contraction bound >= 1 and cannot shrink."""


class QuadratureBudgetError(ConvergenceError):
    """Adaptive quadrature exhausted its panel budget.

    Attributes
    ----------
    partial : complex
        Best estimate accumulated before the budget ran out.
    error_estimate : float
        Estimated absolute error of ``partial``.
    """

    def __init__(self, message, partial=0.0, error_estimate=float("inf")):
        self.partial = partial
        self.error_estimate = error_estimate
        super().__init__(message)


class DegenerateBasisError(ComplexSturmError):
    """Two trajectories supposed to span the solution space are dependent."""


class EigenvalueSearchError(ConvergenceError):
    """The winding-number search could not isolate roots reliably."""
