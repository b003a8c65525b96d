"""Semi-fractional calculus for negatively skewed semistable laws."""

__version__ = "0.1.0"

from .charfun import CharExponent, SemistableSpec, StableParams, psi_integral, psi_series
from .density import semistable_density, stable_density, stable_pde_solution, subordinator_density
from .laplace import LaplaceSystem, lt_closed_form, lt_numeric
from .spectrum import SpectrumResult, extract_spectrum

__all__ = [
    "CharExponent", "SemistableSpec", "StableParams", "psi_integral", "psi_series",
    "semistable_density", "stable_density", "stable_pde_solution", "subordinator_density",
    "LaplaceSystem", "lt_closed_form", "lt_numeric", "SpectrumResult", "extract_spectrum",
]
