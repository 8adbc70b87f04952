"""Exception hierarchy shared by the parser, graph builder and evaluator."""


class DatalogError(Exception):
    """Base class for every user-facing error raised by edgelog."""


class RuleSyntaxError(DatalogError, SyntaxError):
    def __init__(self, message, line=None, source=None):
        self.line_no = line
        self.source_name = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class SafetyError(DatalogError):
    """A rule is not range restricted."""


class AggregateError(DatalogError):
    pass


class UnsafeProgramError(DatalogError):
    """Negation or aggregation through recursion.

    ``cycle`` lists the rule ids of the offending strongly connected component.
    """

    def __init__(self, message, cycle=()):
        self.cycle = tuple(cycle)
        super().__init__(message)


class PlanError(DatalogError):
    pass


class DuplicateRuleError(DatalogError):
    pass


class UnknownRuleError(DatalogError):
    pass


class ComparisonTypeError(DatalogError, TypeError):
    """Ordered comparison or numeric aggregate applied to a non-number."""


class InvariantViolation(AssertionError):
    """Internal consistency check failed; never caused by user input."""
