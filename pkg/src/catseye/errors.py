"""Exception hierarchy shared by all modules."""


class CatseyeError(Exception):
    """Base class; the CLI maps these to exit code 3."""


class DegeneratePoint(CatseyeError):
    pass


class OutOfRange(CatseyeError):
    pass


class InconsistentProblem(CatseyeError):
    pass


class QuadratureDiverged(CatseyeError):
    pass


class SingularEndpoint(CatseyeError):
    pass


class QuadratureUnderResolved(CatseyeError):
    pass


class ConvergenceFailure(CatseyeError):
    pass


class SingularD(CatseyeError):
    pass


class SingularPoint(CatseyeError):
    pass


class NonZeroMean(CatseyeError):
    pass


class MomentUnbounded(CatseyeError):
    pass


class DomainError(CatseyeError):
    pass


class SignViolation(CatseyeError):
    pass
