"""Semiclassical eigenvalue sums for 1D potentials.

Exact spectra (closed forms, Airy zeros, a finite-difference grid), WKB
levels at zeroth and second order, Euler-Maclaurin assembly of eigenvalue
sums, and Thomas-Fermi / gradient-expansion kinetic functionals.
"""
from .errors import (DomainError, NoAllowedRegionError, NoClosedFormError, NormalizationError,
                     NotSupportedError, PrecisionError, SemisumError, UnboundLevelError,
                     UsageError)
from .potentials import (PotentialSpec, classical_momentum, derivatives, evaluate,
                         maslov_index, parse_potential, turning_points)
from .oracle import (PrecisionConfig, Spectrum, airy_eigenvalue, closed_form_eigenvalue,
                     exact_sum, grid_eigenvalues, spectrum)
from .wkb import WkbSeries, action_integral, pt_wkb_closed_form, quantize
from .sums import (AsymptoticSeries, EnergyBreakdown, breakdown, delta_2a, delta_2b,
                   euler_maclaurin_sum, integral_sum, linear_well_series, optimal_truncate)
from .tf import (DensityProfile, gea_kinetic, sp_density, sp_kinetic_density, tf_kinetic,
                 tf_scf, tf_total_energy, vw_kinetic)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticSeries", "DensityProfile", "DomainError", "EnergyBreakdown",
    "NoAllowedRegionError", "NoClosedFormError", "NormalizationError", "NotSupportedError",
    "PotentialSpec", "PrecisionConfig", "PrecisionError", "SemisumError", "Spectrum",
    "UnboundLevelError", "UsageError", "WkbSeries", "action_integral", "airy_eigenvalue",
    "breakdown", "classical_momentum", "closed_form_eigenvalue", "delta_2a", "delta_2b",
    "derivatives", "euler_maclaurin_sum", "evaluate", "exact_sum", "gea_kinetic",
    "grid_eigenvalues", "integral_sum", "linear_well_series", "maslov_index",
    "optimal_truncate", "parse_potential", "pt_wkb_closed_form", "quantize", "sp_density",
    "sp_kinetic_density", "spectrum", "tf_kinetic", "tf_scf", "tf_total_energy",
    "turning_points", "vw_kinetic",
]
