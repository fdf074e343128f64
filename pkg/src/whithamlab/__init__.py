"""Numerical laboratory for solitary waves of the Whitham equation."""
from .errors import (AmbiguityError, BlowUpError, DegenerateInputError, DependencyError, DomainError,
                     NoRealShiftError, NonConvergenceError, PreconditionError, ResolutionError,
                     TruncationError, WhithamError)
from .grid import Grid, SpectralField
from .symbols import Multiplier, resolvent_symbol, strip_halfwidth, whitham_symbol
from .kernels import (KernelTable, check_complete_monotone, fit_decay_rate, kernel_by_quadrature,
                      kernel_positivity_monotonicity, near_origin_profile, resolvent_kernel,
                      synthesize_kernel, whitham_kernel)
from .steady import (GalileanShift, SolitaryWave, continuation_sweep, normalize_galilean,
                     petviashvili_solve, residual)
from .analysis import (convolution_moment_identity, decay_report, factorial_inequality_holds,
                       moving_plane_scan, touching_check, verify_symmetry, weight_inequality_constant,
                       weighted_norm)
from .evolution import evolve, step, symmetry_axis_track, verify_traveling

__version__ = "0.1.0"
