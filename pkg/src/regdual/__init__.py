"""Regularized duality-map iterations for zeros of strongly monotone operators
in l_s spaces, with Lyapunov functionals and inequality auditors."""

from .errors import (ConfigurationError, DivergenceError, DomainError, InvalidInputError,
                     InvalidParameterError, RegdualError, ResolventError, ScheduleError,
                     ScheduleRangeError, ShapeError)
from .geometry import (DualPoint, PrimalPoint, SpaceSpec, duality_map, inverse_duality_map,
                       modulus_bounds, norm_dual, norm_primal, pair)
from .lyapunov import (AuditReport, audit_lemma_ball, audit_phi_bounds, audit_three_point,
                       audit_vp_shift, phi, phi_p, run_audit, v_p)
from .operators import (MonotoneOperator, OperatorStats, estimate_stats, from_j_pseudocontractive,
                        make_diagonal_linear, make_j_pseudo_halved, make_shifted_duality,
                        make_smooth_diagonal, to_j_pseudocontractive)
from .solver import *  # noqa: F401,F403

__version__ = "0.1.0"
