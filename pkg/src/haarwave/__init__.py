"""Hybrid Haar wavelet collocation solver for the 1D wave equation with an
integral (nonlocal) boundary condition."""

__version__ = "0.1.0"

from .errors import HaarwaveError
from .haar import HaarBasis, build_basis
from .problem import ProblemSpec, builtin, check_compatibility, load_problem
from .solver import SolutionRecord, solve
from .stability import stability_report
