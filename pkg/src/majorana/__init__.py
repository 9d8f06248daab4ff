"""Majorana order reduction for scale-invariant second-order ODEs."""
from .gauges import GaugeFunction, gauge_by_name, gauge_identity, gauge_power, gauge_tf_abel, gauge_tf_aux
from .integrate import SolverConfig, Trajectory, integrate_explicit, integrate_implicit, reconstruct_aux, reconstruct_majorana
from .reduction import (
    abel_coefficients,
    abel_reduced,
    abel_rhs,
    aux_reduced,
    aux_rhs,
    generic_reduced,
    seed_from_point,
    tf_abel_reduced,
    tf_aux_reduced,
)
from .scaling import THOMAS_FERMI, EmdenFowlerParams, ScalingLaw, emden_fowler_exponent, emden_fowler_residual, estimate_exponent
from .series import eq35_polynomials, series_solve_rational, tf_boundary_series_at_one
from .verify import (
    compare_curves,
    direct_emden_fowler,
    residual_along_curve,
    tf_initial_slope_reduced,
    tf_initial_slope_series,
    tf_initial_slope_shooting,
)

__version__ = "0.1.0"
