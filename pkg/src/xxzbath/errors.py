"""Exception and warning types shared across the package."""


class ParameterError(ValueError):
    """A physical parameter is outside its valid domain."""


class NonPositiveTemperature(ParameterError):
    pass


class NonPositiveBathCoupling(ParameterError):
    pass


class InvalidParameters(ParameterError):
    """Raised by :func:`xxzbath.model.validate` carrying every violation found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


class FerromagneticRegime(UserWarning):
    """Gamma_z < 0 or Omega < 0: outside the antiferromagnetic regime studied."""


class PreconditionViolation(ValueError):
    pass


class StepSizeUnderflow(RuntimeError):
    pass


class DimensionOverflow(ValueError):
    pass


class EigenFailure(RuntimeError):
    pass


class CoverageGap(ValueError):
    pass


class NotADensityMatrix(ValueError):
    pass


class FallbackToGeneric(ArithmeticError):
    """The X-state shortcut does not apply (rho22 != rho33 or rho23 != rho22)."""


class UnknownFigure(KeyError):
    pass


class ConfigError(ValueError):
    pass
