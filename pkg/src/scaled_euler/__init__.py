"""Exact Riemann solutions and vanishing-epsilon limits for a scaled
two-equation Euler-type system with Brio-type flux."""

from .errors import *  # noqa: F401,F403
from .flux_model import (EigenPair, FluxModel, State, brio, check_genuine_nonlinearity, eigen,
                         eigenvalues, jacobian, quadratic_g, validate_hypotheses)
from .riemann_solver import (Case, IntermediateState, RiemannData, WaveFan, classify, sample,
                             sample_arrays, solve, solve_equal_u, solve_two_rarefaction, solve_two_shock)
from .wave_curves import (RarefactionCurve, lax_admissible, quadratic_g_shock_loci, rarefaction_u_of_rho,
                          rh_residual, shock1_rho_given_u, shock2_rho_given_u, shock_speed)

__version__ = "0.1.0"
