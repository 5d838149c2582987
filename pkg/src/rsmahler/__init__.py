"""Numerical laboratory for Rudin-Shapiro, Fekete and Littlewood polynomials.

Constructions, circle evaluation, M_q / sup / Mahler-measure estimators,
identity and inequality checkers, value-distribution statistics and
convergence sweeps.
"""

__version__ = "0.1.0"

from .constants import E_NEG_HALF_GAMMA, EULER_GAMMA, GAMMA_RS, SQRT_2_OVER_E
from .distribution import DistReport, montgomery_statistic, saffari_statistic
from .evaluation import (
    CircleSamples, GridError, ModulusSquaredSamples, eval_circle, eval_point,
    modulus_squared, rn_derivative_samples,
)
from .experiments import (
    SweepRow, fekete_experiments, littlewood_average, sweep_rs_mahler, sweep_rs_mq,
)
from .norms import (
    NormEstimate, mahler_extrapolate, mahler_from_zeros, mahler_quadrature, mq_norm, sup_norm,
)
from .poly import (
    DomainError, RSPair, ResourceLimitError, SignedPoly, fekete, from_text, is_prime,
    legendre_symbol, littlewood_enumerate, littlewood_sample, rudin_shapiro, to_text,
)
from .verify import (
    CheckReport, check_bernstein_szego, check_grid_lower_bound, check_parallelogram_exact,
    check_q_symmetry, check_rn_derivative_bound, check_zero_annulus, check_zero_counting,
    check_zero_separation,
)
from .zeros import ZeroFinderError, ZeroSet, find_zeros
