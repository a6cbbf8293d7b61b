from .params import ParameterError


class NumericalError(RuntimeError):
    """Quadrature or Fourier inversion failed to reach its accuracy target."""


__all__ = ["NumericalError", "ParameterError"]
