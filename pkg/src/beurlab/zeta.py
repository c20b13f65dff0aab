"""The zeta function of a generalized prime system and its analytic companions.

Everything lives in the absolute-convergence half-plane Re s > 1 (+ margin):
the truncated Euler product with a density-integral tail bracket, the exact
Dirichlet partial sum over enumerated norms, the logarithmic derivative, the
pole-free combination D(s), the closed-form Mellin blocks I(z, s) and L(s),
the empirical remainder of log zeta after the L-terms are peeled off, the
rational factor Q(s) vanishing on the prescribed zeros, and the zero-count
bound of the critical rectangle.

log zeta needs no branch tracking here: each Euler factor satisfies
|p^{-s}| < 1, so log(1 - p^{-s}) stays in the principal branch for every
factor and the sum is automatically the analytic continuation from the real
axis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .density import TargetDensity
from .errors import DomainError, PoleError
from .prime_sampler import PrimeSystem
from .semigroup import NormStream

DEFAULT_MARGIN = 0.05


@dataclass
class ZetaContext:
    """Prime system + density + truncation governing all evaluations."""

    ps: PrimeSystem
    dens: TargetDensity | None = None
    X_cut: float | None = None
    tail_policy: str = "estimate"
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        if self.X_cut is None:
            self.X_cut = self.ps.x_max
        if self.X_cut > self.ps.x_max:
            raise DomainError("X_cut cannot exceed the sampled range")
        if self.tail_policy not in ("reject", "estimate"):
            raise DomainError(f"unknown tail policy {self.tail_policy!r}")

    def _require_convergent(self, s: complex) -> complex:
        s = complex(s)
        if s.real < 1.0 + self.margin:
            raise DomainError(
                f"Re s = {s.real} is inside the divergence region; need "
                f"Re s >= 1 + margin ({1.0 + self.margin})"
            )
        return s


def _density_tail(ctx: ZetaContext, sigma: float) -> float:
    """integral_{X_cut}^inf y^{-sigma} dF(y) (0 if no density attached)."""
    if ctx.dens is None:
        return 0.0
    full = mellin_L(ctx.dens, complex(sigma)).real
    part = float(np.real(ctx.dens.partial_mellin(sigma, np.asarray([ctx.X_cut]))[0]))
    return max(full - part, 0.0)


def _euler_log_tail_bound(ctx: ZetaContext, sigma: float) -> float:
    """Bound on |sum_{p > X_cut} -log(1 - p^{-s})|.

    Density integral for the main mass, 4 X^{-sigma} for the |pi - F| <= 2
    sampling discrepancy (after partial integration), and the geometric
    factor for higher prime powers.
    """
    X = ctx.X_cut
    base = _density_tail(ctx, sigma) + 4.0 * X ** (-sigma)
    return base / (1.0 - X ** (-sigma))


def zeta_euler(ctx: ZetaContext, s: complex) -> tuple[complex, float]:
    """Truncated Euler product prod_{p <= X_cut} (1 - p^{-s})^{-1}.

    Returns (value, tail) with value * exp(+-tail) bracketing the full
    product.  Refuses Re s < 1 + margin.
    """
    s = ctx._require_convergent(s)
    logp = ctx.ps.log_primes
    logp = logp[logp <= math.log(ctx.X_cut)]
    log_val = -np.sum(np.log1p(-np.exp(-s * logp)))
    tail = _euler_log_tail_bound(ctx, s.real) if ctx.tail_policy == "estimate" else 0.0
    if ctx.tail_policy == "reject" and _euler_log_tail_bound(ctx, s.real) > 1e-12:
        raise DomainError("tail not negligible and tail_policy is 'reject'")
    return complex(np.exp(log_val)), float(tail)


def log_zeta(ctx: ZetaContext, s: complex) -> tuple[complex, float]:
    """log of the truncated Euler product (principal branch per factor,
    hence the continuous branch from the real axis), with tail bound."""
    s = ctx._require_convergent(s)
    logp = ctx.ps.log_primes
    logp = logp[logp <= math.log(ctx.X_cut)]
    val = complex(-np.sum(np.log1p(-np.exp(-s * logp))))
    return val, float(_euler_log_tail_bound(ctx, s.real))


def zeta_dirichlet(ctx: ZetaContext, s: complex, X: float) -> complex:
    """Exact partial sum sum_{|g| <= X} |g|^{-s} over enumerated norms."""
    s = complex(s)
    if X > ctx.X_cut:
        raise DomainError(f"X={X} beyond the enumeration cutoff {ctx.X_cut}")
    total = 0.0 + 0.0j
    for lognorms in NormStream(ctx.ps, X):
        total += np.exp(-s * lognorms).sum()
    return complex(total)


def log_deriv(ctx: ZetaContext, s: complex) -> tuple[complex, float]:
    """-zeta'/zeta(s) = sum over prime powers p^k <= X_cut of log p * p^{-ks}.

    The tail bound covers primes beyond X_cut (log-weighted density integral
    plus discrepancy) and the dropped powers p^k > X_cut of retained primes.
    """
    s = ctx._require_convergent(s)
    X = ctx.X_cut
    logX = math.log(X)
    logp = ctx.ps.log_primes
    logp = logp[logp <= logX]
    total = 0.0 + 0.0j
    k = 1
    while len(logp) and k * logp[0] <= logX:
        sel = logp[k * logp <= logX]
        total += np.sum(sel * np.exp(-s * k * sel))
        k += 1
    tail = 0.0
    if ctx.tail_policy == "estimate":
        sigma = s.real
        if ctx.dens is not None:
            fullT = _mellin_L_log_weighted(ctx.dens, complex(sigma)).real
            partT = _partial_log_weighted(ctx.dens, sigma, X)
            tail += max(fullT - partT, 0.0)
        tail += 4.0 * math.log(X) * X ** (-sigma)  # |pi - F| <= 2 discrepancy
        tail /= 1.0 - X ** (-sigma)
        # powers p^k > X_cut of primes kept: each bounded by X^{-sigma} log p
        theta_X = float(np.sum(logp))
        tail += theta_X * X ** (-sigma) / (1.0 - float(np.exp(-sigma * logp[0]))) if len(logp) else 0.0
    return complex(total), float(tail)


def d_function(ctx: ZetaContext, s: complex) -> tuple[complex, float]:
    """D(s) = -zeta'/zeta(s) - s/(s-1), the pole-free Mellin transform of
    the PNT error term."""
    s = complex(s)
    if abs(s - 1.0) < 1e-12:
        raise PoleError("s = 1 is the removed pole of D")
    val, tail = log_deriv(ctx, s)
    return val - s / (s - 1.0), tail


def d_function_quadrature(ctx: ZetaContext, s: complex, X: float | None = None) -> complex:
    """s * integral_1^X Delta(x) x^{-s-1} dx, integrated exactly over the
    piecewise structure of psi (cross-check route for D)."""
    s = complex(s)
    X = float(X if X is not None else ctx.X_cut)
    logX = math.log(X)
    logp = ctx.ps.log_primes
    logp = logp[logp <= logX]
    # s int_1^X psi x^{-s-1} dx = sum_{p^k <= X} Lambda (p^{-ks} - X^{-s})
    psi_sum = 0.0 + 0.0j
    psi_X = 0.0
    k = 1
    while len(logp) and k * logp[0] <= logX:
        sel = logp[k * logp <= logX]
        psi_sum += np.sum(sel * (np.exp(-s * k * sel) - np.exp(-s * logX)))
        psi_X += float(np.sum(sel))
        k += 1
    # s int_1^X x * x^{-s-1} dx = s/(s-1) (1 - X^{1-s})
    lin = s / (s - 1.0) * (1.0 - np.exp((1.0 - s) * logX))
    return complex(psi_sum - lin)


def mellin_I(z: complex, s: complex) -> complex:
    """I(z, s) = integral_1^inf (x^{z-s} - x^{z-1-s})/log x dx
    = log((s - z)/(s - z - 1)), principal branch (safe: Re(s - z) > 1)."""
    z, s = complex(z), complex(s)
    if z.real > 0:
        raise DomainError(f"need Re z <= 0, got {z.real}")
    if s.real <= 1.0:
        raise DomainError(f"need Re s > 1, got {s.real}")
    return cmath.log((s - z) / (s - z - 1.0))


def _L_terms(dens: TargetDensity):
    """(coef, w) pairs with L(s) = sum coef * log((s - w)/(s - w - 1))."""
    terms = [(1.0, 0.0 + 0.0j), (1.0, complex(dens.r - 1.0)), (float(dens.M), -0.5 + 0.0j)]
    for b, g, mult in dens.zeros.zeros:
        if g == 0:
            terms.append((-float(mult), complex(b - 1.0)))
        else:
            terms.append((-float(mult), complex(b - 1.0, g)))
            terms.append((-float(mult), complex(b - 1.0, -g)))
    return terms


def mellin_L(dens: TargetDensity, s: complex) -> complex:
    """L(s) = Mellin transform of F: the closed-form sum of I blocks.

    Singular exactly at s in {1, r, 1/2} union the zero multiset (each is a
    w + 1 of some term) -- those evaluations raise.
    """
    s = complex(s)
    total = 0.0 + 0.0j
    for c, w in _L_terms(dens):
        a = s - w
        b = s - w - 1.0
        if abs(a) < 1e-12 or abs(b) < 1e-12:
            raise PoleError(f"L(s) singular at s = {s} (term w = {w})")
        total += c * cmath.log(a / b)
    return total


def _mellin_L_log_weighted(dens: TargetDensity, s: complex) -> complex:
    """integral_1^inf log y * y^{-s} dF(y) = -L'(s), closed form."""
    s = complex(s)
    total = 0.0 + 0.0j
    for c, w in _L_terms(dens):
        total += c * (1.0 / (s - w - 1.0) - 1.0 / (s - w))
    return total


def _partial_log_weighted(dens: TargetDensity, sigma: float, X: float) -> float:
    """integral_1^X log y * y^{-sigma} dF(y) by derivative of the closed-form
    partial Mellin transform (finite difference is avoided: exact formula)."""
    u = math.log(X)
    total = 0.0
    for c, w in _L_terms(dens):
        # -d/ds [Ein((s-w)u) - Ein((s-w-1)u)] with Ein'(z) = (1 - e^{-z})/z
        a1 = sigma - w
        a2 = sigma - w - 1.0
        t1 = (1.0 - cmath.exp(-a1 * u)) / a1 if abs(a1) > 1e-14 else u
        t2 = (1.0 - cmath.exp(-a2 * u)) / a2 if abs(a2) > 1e-14 else u
        total += (c * (t2 - t1)).real
    return total


def rstar_empirical(ctx: ZetaContext, s: complex) -> tuple[complex, float]:
    """R*(s) = log zeta(s) - L(s) - L(2s)/2, the analytic remainder of the
    log-zeta decomposition, with the Euler tail bound attached."""
    if ctx.dens is None:
        raise DomainError("rstar needs the target density attached to the context")
    val, tail = log_zeta(ctx, s)
    s = complex(s)
    return val - mellin_L(ctx.dens, s) - 0.5 * mellin_L(ctx.dens, 2 * s), tail


def rstar_envelope(s: complex) -> float:
    """Shape of the remainder bound: sigma/(sigma - 1/2)
    + sigma sqrt(log(|t| + 2))/sqrt(sigma - 1/2)."""
    s = complex(s)
    sig, t = s.real, s.imag
    if sig <= 0.5:
        raise DomainError("envelope defined for Re s > 1/2")
    return sig / (sig - 0.5) + sig * math.sqrt(math.log(abs(t) + 2.0)) / math.sqrt(sig - 0.5)


def q_eval(dens: TargetDensity, s: complex) -> complex:
    """Q(s) = prod(s - rho) / ((s-1)(s-r)(s-1/2)^M); vanishes exactly on the
    prescribed zero multiset."""
    s = complex(s)
    for pole, name in ((1.0, "s=1"), (dens.r, "s=r"), (0.5, "s=1/2")):
        if abs(s - pole) < 1e-12:
            raise PoleError(f"Q has a pole at {name}")
    num = 1.0 + 0.0j
    for rho in dens.zeros.expanded():
        num *= s - rho
    return num / ((s - 1.0) * (s - dens.r) * (s - 0.5) ** dens.M)


def zero_count_bound(b: float, T: float, A: float, kappa: float, theta: float) -> float:
    """Upper bound for the zero count of the rectangle Re in [b,1], |Im| < T:
    (1/(b-theta)) { T log T / 2 + (2 log(A+kappa) + log(1/(b-theta)) + 3) T }."""
    if not (theta < b < 1.0):
        raise DomainError(f"need theta < b < 1, got theta={theta}, b={b}")
    if T < 5.0:
        raise DomainError("bound is stated for T >= 5")
    g = b - theta
    return (0.5 * T * math.log(T) + (2.0 * math.log(A + kappa) + math.log(1.0 / g) + 3.0) * T) / g


def check_zero_count(dens: TargetDensity, b: float, T: float, A: float, kappa: float,
                     theta: float) -> dict:
    """Compare the prescribed zero count in the rectangle against the bound
    (valid because the constructed zeta vanishes exactly on the multiset)."""
    bound = zero_count_bound(b, T, A, kappa, theta)
    count = dens.zeros.count_in_box(b, T)
    return {"count": count, "bound": bound, "ok": count <= bound}
