"""Exception types raised by the solver stack."""


class MeshError(ValueError):
    """Malformed or invalid mesh data.

    ``line`` is the 1-based line of the offending record when the mesh came
    from text; ``element`` is the triangle index when it is known.
    """

    def __init__(self, message, line=None, element=None):
        self.message = message
        self.line = line
        self.element = element
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DegenerateElementError(ArithmeticError):
    def __init__(self, element, condition):
        self.element = element
        self.condition = condition
        super().__init__(
            f"element {element}: local moment system is ill-conditioned (cond ~ {condition:.3g})")


class SingularSystemError(ArithmeticError):
    """Raised when factorization meets a (numerically) zero pivot.

    ``pivot`` is the row of the assembled system where the zero pivot occurred,
    or -1 when the factorization backend does not report it.
    """

    def __init__(self, pivot, detail="", context=None):
        self.pivot = pivot
        self.detail = detail
        self.context = context
        msg = f"singular system at pivot {pivot}"
        if detail:
            msg += f": {detail}"
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)


class EigenSolverError(RuntimeError):
    pass
