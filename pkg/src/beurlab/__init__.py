"""beurlab: a numerical laboratory for Beurling generalized prime systems.

Construct a prime system whose zeta function has prescribed zeros, then
measure what those zeros do to the prime-counting error term: the
Riemann-von Mangoldt residual, the density-hypothesis exponent of the
integer counts, a Gaussian-window integral against its residue-side
evaluation, and the pi/2 interference bound realized by a low-norm sine
polynomial.
"""

__version__ = "0.1.0"

from .analysis_kernels import (
    PowerSumInstance,
    cassels_max,
    gaussian_line_integral,
    verify_estimate_bounds,
)
from .density import CachedF, TargetDensity, ZeroSpec, m_min
from .errors import BudgetError, ConfigError, DomainError, MissingArtifactError, PoleError
from .oscillation import (
    k_sup,
    residue_side,
    rvm_residual,
    s_pair,
    u_weighted,
    verify_interference,
    verify_lower_oscillation,
)
from .prime_sampler import (
    PrimeSystem,
    discrepancy_J,
    load_prime_system,
    sample_primes,
    save_prime_system,
)
from .semigroup import (
    IntegerCounts,
    SummaryTables,
    axiom_a_fit,
    chebyshev_tables,
    enumerate_norms,
)
from .sine_polynomial import (
    SinePolynomial,
    eval_poly,
    search_low_norm,
    smooth_index_polynomial,
    sup_norm,
)
from .zeta import (
    ZetaContext,
    d_function,
    log_deriv,
    mellin_I,
    mellin_L,
    q_eval,
    rstar_empirical,
    zero_count_bound,
    zeta_dirichlet,
    zeta_euler,
)

__all__ = [
    "PowerSumInstance",
    "cassels_max",
    "gaussian_line_integral",
    "verify_estimate_bounds",
    "CachedF",
    "TargetDensity",
    "ZeroSpec",
    "m_min",
    "BudgetError",
    "ConfigError",
    "DomainError",
    "MissingArtifactError",
    "PoleError",
    "k_sup",
    "residue_side",
    "rvm_residual",
    "s_pair",
    "u_weighted",
    "verify_interference",
    "verify_lower_oscillation",
    "PrimeSystem",
    "discrepancy_J",
    "load_prime_system",
    "sample_primes",
    "save_prime_system",
    "IntegerCounts",
    "SummaryTables",
    "axiom_a_fit",
    "chebyshev_tables",
    "enumerate_norms",
    "SinePolynomial",
    "eval_poly",
    "search_low_norm",
    "smooth_index_polynomial",
    "sup_norm",
    "ZetaContext",
    "d_function",
    "log_deriv",
    "mellin_I",
    "mellin_L",
    "q_eval",
    "rstar_empirical",
    "zero_count_bound",
    "zeta_dirichlet",
    "zeta_euler",
]
