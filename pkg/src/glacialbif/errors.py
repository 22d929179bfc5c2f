"""Exception hierarchy shared by every analysis module."""


class AnalysisError(Exception):
    """Base class for all failures raised by glacialbif."""


class ParameterError(AnalysisError, ValueError):
    """A parameter violates its declared domain."""


class NotAHopfPoint(AnalysisError):
    pass


class NotAnEquilibrium(AnalysisError):
    pass


class NotASaddle(AnalysisError):
    pass


class EmptyRange(AnalysisError):
    pass


class IntegrationError(AnalysisError):
    pass


class StepFailure(IntegrationError):
    pass


class Diverged(IntegrationError):
    pass


class NoCrossing(IntegrationError):
    pass


class NoCycleInBracket(AnalysisError):
    pass


class NoSignChange(AnalysisError):
    pass


class QuadratureError(AnalysisError):
    pass
