"""Exception hierarchy.

``MathError`` subclasses signal a mathematical obstruction (singular operator,
inseparable spectral sets, ...); ``FormatError`` signals a malformed document.
The command line maps the first family to exit code 1 and the second to 2.
"""

import numpy as np


class QSpectralError(Exception):
    pass


class MathError(QSpectralError):
    pass


class FormatError(QSpectralError, ValueError):
    pass


class DimensionError(QSpectralError, ValueError):
    pass


class StructureError(MathError, ValueError):
    pass


class SingularOperatorError(MathError, np.linalg.LinAlgError):
    def __init__(self, message, smallest_singular_value=None):
        super().__init__(message)
        self.smallest_singular_value = smallest_singular_value


class SpectrumError(MathError):
    pass


class SeparationError(MathError):
    pass


class QuadratureError(MathError):
    def __init__(self, message, last_delta=None):
        super().__init__(message)
        self.last_delta = last_delta


class NoGroupInverseError(MathError):
    pass


class PreconditionError(MathError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class IllSeparatedWarning(UserWarning):
    pass
