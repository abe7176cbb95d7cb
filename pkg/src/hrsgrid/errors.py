"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI can map
failures to exit codes without string matching.
"""


class HrsGridError(Exception):
    code = "ERROR"


class InputError(HrsGridError):
    """Bad user input: malformed files, dangling references, bad parameters."""

    code = "INPUT"


class DomainError(InputError, ValueError):
    code = "DOMAIN"


class ParamError(InputError, ValueError):
    code = "PARAM"


class ValidationError(InputError):
    code = "VALIDATION"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = list(report or [])


class UnreachableError(InputError):
    code = "UNREACHABLE"


class InconsistentInputError(InputError):
    code = "INCONSISTENT_INPUT"


class OverCapError(InputError, ValueError):
    code = "OVER_CAP"


class MissingDesignsError(InputError):
    code = "MISSING_DESIGNS"


class EmptySystemError(InputError):
    code = "EMPTY_SYSTEM"


class ParseError(InputError):
    code = "PARSE"

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class SolveError(HrsGridError):
    """The optimization problem has no optimal solution."""

    code = "SOLVE"

    def __init__(self, message, status=None, report=None):
        super().__init__(message)
        self.status = status
        self.report = list(report or [])


class InfeasibleError(SolveError):
    code = "INFEASIBLE"


class UnboundedError(SolveError):
    code = "UNBOUNDED"


class MissingDualsError(HrsGridError):
    code = "MISSING_DUALS"


class ZeroProductionError(HrsGridError):
    code = "ZERO_PRODUCTION"


class DegenerateError(HrsGridError, ValueError):
    code = "DEGENERATE"
