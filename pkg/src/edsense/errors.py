"""Exception types shared across the package.

The hierarchy is deliberately small: callers distinguish *invalid inputs*
(``DomainError``), *iteration budgets exhausted* (``ConvergenceError``), and
*results that would silently lose certified accuracy* (``InstabilityError``).
The CLI maps these onto its exit-code contract.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class RangeLimitError(DomainError):
    """An argument is mathematically valid but outside the supported range
    for which the implementation can certify its accuracy contract."""


class ConvergenceError(RuntimeError):
    """An iterative scheme exhausted its iteration budget before meeting
    its stopping criterion."""


class InstabilityError(ArithmeticError):
    """A closed-form route would lose its certified accuracy to cancellation;
    callers should fall back to a quadrature route."""
