class SubLaplacianException(Exception):
    exit_code = 1


class ConfigurationError(SubLaplacianException):
    exit_code = 2


class InvalidParameter(SubLaplacianException, ValueError):
    exit_code = 2


class DimensionMismatch(InvalidParameter):
    pass


class GridError(InvalidParameter):
    pass


class SamplingError(InvalidParameter):
    pass


class NumericalAbort(SubLaplacianException):
    exit_code = 3


class DecompositionError(NumericalAbort):
    pass


class SignatureDriftError(NumericalAbort):
    pass


class PoleProximityError(NumericalAbort):
    pass


class QuadratureError(NumericalAbort):
    pass
