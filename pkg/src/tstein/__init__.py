"""Stein's method for two-sided tempered stable distributions (TSD).

Submodules: params, levy_cf, density, sampling, stein_op, semigroup,
distances, applications and cli.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import NumericalError, ParameterError
from .params import (TsdParams, VG0, VG1, VG2, gamma, laplace, special_case_of, symmetric, tsd,
                     validate, vg_convert)
from .levy_cf import cf, cf_exponent, cf_t, cumulant, law_cf, levy_density
from .density import GridFunction, cdf, density_grid, expectation
from .sampling import ChaosSpec, SampleSet, YSpec, sample_gamma, sample_tsd
from .stein_op import SteinOperatorSpec, identity_residual, stein_apply
from .semigroup import check_bounds, pt_apply, solve_stein
from .testfunctions import TestFunction, default_dictionary

__all__ = [
    "BACKEND", "NumericalError", "ParameterError", "TsdParams", "VG0", "VG1", "VG2", "gamma",
    "laplace", "special_case_of", "symmetric", "tsd", "validate", "vg_convert", "cf",
    "cf_exponent", "cf_t", "cumulant", "law_cf", "levy_density", "GridFunction", "cdf",
    "density_grid", "expectation", "ChaosSpec", "SampleSet", "YSpec", "sample_gamma",
    "sample_tsd", "SteinOperatorSpec", "identity_residual", "stein_apply", "check_bounds",
    "pt_apply", "solve_stein", "TestFunction", "default_dictionary",
]
