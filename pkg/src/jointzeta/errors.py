"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class JointZetaError(Exception):
    exit_code = 3


class EmptyTableError(JointZetaError, ValueError):
    exit_code = 1


class OutOfRangeError(JointZetaError, IndexError):
    exit_code = 1


class RangeError(JointZetaError, ValueError):
    """A cutoff or window reaches past the sieve limit."""
    exit_code = 3


class PoleError(JointZetaError, ZeroDivisionError):
    exit_code = 3


class AccuracyError(JointZetaError):
    """Error estimate exceeded the caller's tolerance; ``best`` holds the value anyway."""
    exit_code = 3

    def __init__(self, msg, best=None, error=None):
        super().__init__(msg)
        self.best = best
        self.error = error


class ZeroOnPathError(JointZetaError):
    exit_code = 3

    def __init__(self, msg, point=None, modulus=None):
        super().__init__(msg)
        self.point = point
        self.modulus = modulus


class ResolutionError(JointZetaError, ValueError):
    exit_code = 3


class ContourError(JointZetaError):
    exit_code = 3


class BudgetError(JointZetaError):
    exit_code = 4


class NonConvergenceError(JointZetaError):
    exit_code = 2

    def __init__(self, msg, best=None, residual=None):
        super().__init__(msg)
        self.best = best
        self.residual = residual
