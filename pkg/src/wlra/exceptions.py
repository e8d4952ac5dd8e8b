"""Exception hierarchy shared by every module of the package."""


class WLRAError(Exception):
    """Base class for all errors raised by :mod:`wlra`."""


class DimensionError(WLRAError, ValueError):
    """Operands have incompatible shapes."""


class ParameterError(WLRAError, ValueError):
    """A scalar parameter or instance kind is outside its admissible range."""


class CapacityError(WLRAError):
    """The request exceeds a hard size limit (exhaustive oracle, overflow guard)."""


class ConstraintError(WLRAError, ValueError):
    """A combinatorial object violates its defining constraint (e.g. a biclique covering a non-edge)."""


class HypothesisViolationError(ConstraintError):
    """An extracted set is not a biclique because the threshold hypothesis fails."""


class DegenerateInputError(WLRAError, ValueError):
    """Input makes the requested quantity undefined (all-zero factor, no zero entries, ...)."""


class InconsistencyError(WLRAError):
    """A computed result contradicts a documented precondition."""


class FormatError(WLRAError, ValueError):
    """A text file does not follow the expected format."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
