"""Casimir-Polder forces on an atom above a gyrotropic (magnetized plasma) half-space.

Normalized units throughout: omega_p = c = eps0 = hbar = 1.  Forces are
reported in units of F0 = 3|gamma|^2 / (16 pi d^4).
"""
__version__ = "0.1.0"

from .errors import (BandEdgeDivergence, BranchLost, ConfigError, DomainError, GyroError,
                     NoSolution, OutsideWindow, ToleranceNotMet)
from .material import PlasmaMaterial, eval_components, permittivity_tensor
from .quadrature import QuadSpec, integrate_1d, integrate_semiinf
from .slab_em import TangentialWavevector, bulk_modes, fresnel_reflection, reflection_matrix
from .greens import HalfSpaceGeometry, field_map, green_imag_axis, green_scattered
from .spp import band_edges, omega_theta, qs_mode_norm, solve_spp_dispersion, solve_theta0
from .force import (AtomState, casimir_force, compute_forces, decay_rate, resonant_force,
                    total_force)
from .qs_force import (orientation_average_g, polarization_factors, qs_lateral_force,
                       qs_normal_force, weak_bias_lateral, weak_bias_normal)
