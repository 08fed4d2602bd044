"""Exception types shared across the library."""


class NonConvergenceError(RuntimeError):
    """A series or quadrature ran out of its iteration budget before
    reaching the requested tolerance.

    This usually signals an input far outside the intended parameter
    envelope (for instance an extremely small noise intensity pushed
    through a series evaluator) rather than a numerical bug.
    """
