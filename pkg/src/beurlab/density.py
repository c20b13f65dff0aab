"""Target prime-counting densities built from a prescribed zeta-zero multiset.

A density is assembled from the generating function

    f0(x) = x + (1/r) x^r + 2 M sqrt(x) - sum_rho x^rho / rho,

summed over a conjugate-closed zero multiset, and smoothed into the
nondecreasing target

    F(x) = integral_1^x (1 - 1/y)/log y * f0'(y) dy.

Because f0' is a finite combination of power terms c * y^w, every integral
this module needs -- F itself, partial Mellin transforms
integral_1^x y^{-s} dF(y), and the log-weighted integral_1^x log y dF(y) --
has a closed form in the entire exponential integral Ein (see _special).
The high-frequency zero terms make naive quadrature useless (the integrand
oscillates like cos(gamma log y) with gamma in the thousands), so the closed
form is the production path and adaptive quadrature survives only as a test
oracle.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from ._special import ein_complex, ein_real
from .errors import DomainError


@dataclass(frozen=True)
class ZeroSpec:
    """Prescribed zeta-zero multiset, stored with gamma >= 0; conjugates implied.

    Each entry is (beta, gamma, multiplicity).  The expanded multiset counts a
    gamma > 0 entry twice (once for the conjugate), so it is symmetric under
    gamma -> -gamma.
    """

    zeros: tuple = ()

    def __post_init__(self):
        norm = []
        for beta, gamma, mult in self.zeros:
            beta = float(beta)
            gamma = float(gamma)
            mult = int(mult)
            if not (0.0 < beta < 1.0):
                raise DomainError(f"zero real part {beta} outside (0, 1)")
            if gamma < 0.0:
                raise DomainError("store zeros with gamma >= 0; conjugates are implied")
            if mult < 1:
                raise DomainError("multiplicity must be a positive integer")
            norm.append((beta, gamma, mult))
        object.__setattr__(self, "zeros", tuple(norm))

    @property
    def total_multiplicity(self) -> int:
        """Count over the expanded (conjugate-closed) multiset."""
        return sum(m * (2 if g > 0 else 1) for _, g, m in self.zeros)

    @property
    def max_beta(self) -> float:
        if not self.zeros:
            return 0.0
        return max(b for b, _, _ in self.zeros)

    def expanded(self):
        """All zeros as complex numbers, conjugates included, by multiplicity."""
        out = []
        for b, g, m in self.zeros:
            out.extend([complex(b, g)] * m)
            if g > 0:
                out.extend([complex(b, -g)] * m)
        return out

    def count_in_box(self, b: float, T: float) -> int:
        """Zeros of the expanded multiset with Re in [b, 1] and |Im| < T."""
        return sum(1 for z in self.expanded() if b <= z.real <= 1.0 and abs(z.imag) < T)


def m_min(zeros: ZeroSpec) -> int:
    """Smallest M guaranteed (by the crude sufficient bound) to keep f0 nondecreasing.

    Returns ceil(2 N^(1/(2(1-B)))) with N the expanded multiplicity and
    B = max Re rho; 1 for an empty spec.
    """
    n = zeros.total_multiplicity
    if n == 0:
        return 1
    B = zeros.max_beta
    if B >= 1.0:
        raise DomainError("max zero real part must be < 1")
    return int(math.ceil(2.0 * n ** (1.0 / (2.0 * (1.0 - B)))))


@dataclass(frozen=True)
class TargetDensity:
    """(r, zeros, M) defining f0 and the smoothed nondecreasing F.

    M >= m_min(zeros) is enforced unless ``unsafe_allow_small_m`` is set; the
    override is intended for testing and for systems where a direct scan
    certifies f0' >= 0 with a smaller M (the m_min formula is sufficient, not
    necessary).
    """

    r: float
    zeros: ZeroSpec = field(default_factory=ZeroSpec)
    M: int | None = None
    unsafe_allow_small_m: bool = False

    def __post_init__(self):
        r = float(self.r)
        if not (0.5 <= r < 1.0):
            raise DomainError(f"r={r} outside [1/2, 1)")
        object.__setattr__(self, "r", r)
        for b, _, _ in self.zeros.zeros:
            if b <= r:
                raise DomainError(f"zero real part {b} must exceed r={r}")
        m0 = m_min(self.zeros)
        if self.M is None:
            object.__setattr__(self, "M", m0)
        else:
            object.__setattr__(self, "M", int(self.M))
            if self.M < m0 and not self.unsafe_allow_small_m:
                raise DomainError(
                    f"M={self.M} below m_min={m0}; pass unsafe_allow_small_m=True "
                    "only with independently verified monotonicity"
                )
        # f0' = sum over terms of c * y^w; real terms and gamma>0 pair terms
        # (a pair term stands for itself plus its conjugate: take 2*Re).
        cr = [1.0, 1.0, float(self.M)]
        wr = [0.0, self.r - 1.0, -0.5]
        cp, wp = [], []
        for b, g, mult in self.zeros.zeros:
            if g == 0:
                cr.append(-float(mult))
                wr.append(b - 1.0)
            else:
                cp.append(-float(mult))
                wp.append(complex(b - 1.0, g))
        object.__setattr__(self, "_cr", np.array(cr))
        object.__setattr__(self, "_wr", np.array(wr))
        object.__setattr__(self, "_cp", np.array(cp))
        object.__setattr__(self, "_wp", np.array(wp, dtype=complex))

    # -- identity ---------------------------------------------------------

    def config_string(self) -> str:
        zs = "|".join(f"{b!r},{g!r},{m}" for b, g, m in self.zeros.zeros)
        return f"r={self.r!r};zeros={zs};M={self.M}"

    def fingerprint(self) -> bytes:
        """32-byte digest identifying this density; embedded in prime files."""
        return hashlib.sha256(self.config_string().encode()).digest()

    @property
    def max_gamma(self) -> float:
        gs = [g for _, g, _ in self.zeros.zeros]
        return max(gs) if gs else 0.0

    # -- pointwise f0 -----------------------------------------------------

    def f0(self, x):
        """f0(x) = x + (1/r) x^r + 2M sqrt(x) - sum x^rho/rho, elementwise real."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 1.0):
            raise DomainError("f0 is defined for x >= 1")
        out = x + x**self.r / self.r + 2.0 * self.M * np.sqrt(x)
        for b, g, mult in self.zeros.zeros:
            if g == 0:
                out = out - mult * x**b / b
            else:
                rho = complex(b, g)
                arho = abs(rho)
                # x^rho/rho + conj: 2 x^b cos(g log x - arg rho)/|rho|
                out = out - mult * 2.0 * x**b * np.cos(g * np.log(x) - np.angle(rho)) / arho
        return out

    def f0_prime(self, x):
        """f0'(x) = 1 + x^{r-1} + M x^{-1/2} - sum x^{rho-1}, elementwise real."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 1.0):
            raise DomainError("f0' is defined for x >= 1")
        out = (np.power.outer(x, self._wr) @ self._cr).astype(float)
        if len(self._cp):
            out = out + 2.0 * (np.power.outer(x + 0j, self._wp) @ self._cp).real
        return out

    def verify_monotone(self, x_max: float, points: int = 4096) -> bool:
        """Scan f0' >= 0 on a log grid; cheap certificate for small-M overrides."""
        grid = np.geomspace(1.0, x_max, points)
        return bool(np.all(self.f0_prime(grid) >= -1e-12))

    # -- closed-form integrals against dF ---------------------------------

    def _ein_sum(self, u, shift=0.0 + 0.0j):
        """sum_terms c [Ein((shift - w) u) - Ein((shift - w - 1) u)].

        With shift = s this is integral_1^x y^{-s} dF(y) for u = log x; the
        real and conjugate-pair parts are assembled separately so a real
        shift yields an exactly real result.
        """
        u = np.asarray(u, dtype=float)
        if np.iscomplexobj(np.asarray(shift)) and np.asarray(shift).imag != 0:
            a = ein_complex(np.multiply.outer(u, shift - self._wr))
            b = ein_complex(np.multiply.outer(u, shift - self._wr - 1.0))
            tot = (a - b) @ self._cr
            if len(self._cp):
                # a pair contributes w and conj(w); with a complex shift the
                # two halves are not conjugates of each other, so do both
                wp = self._wp
                a1 = ein_complex(np.multiply.outer(u, shift - wp))
                b1 = ein_complex(np.multiply.outer(u, shift - wp - 1.0))
                a2 = ein_complex(np.multiply.outer(u, shift - np.conj(wp)))
                b2 = ein_complex(np.multiply.outer(u, shift - np.conj(wp) - 1.0))
                tot = tot + ((a1 - b1) + (a2 - b2)) @ self._cp
            return tot
        sr = float(np.real(shift))
        a = ein_real(np.multiply.outer(u, sr - self._wr))
        b = ein_real(np.multiply.outer(u, sr - self._wr - 1.0))
        tot = (a - b) @ self._cr
        if len(self._cp):
            a1 = ein_complex(np.multiply.outer(u, sr - self._wp))
            b1 = ein_complex(np.multiply.outer(u, sr - self._wp - 1.0))
            tot = tot + 2.0 * (((a1 - b1)) @ self._cp).real
        return tot

    def F(self, x):
        """F(x) = integral_1^x (1-1/y)/log y * f0'(y) dy, exact closed form."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 1.0):
            raise DomainError("F is defined for x >= 1")
        return np.real(self._ein_sum(np.log(x)))

    def F_density(self, x):
        """dF/dx = (1 - 1/x)/log x * f0'(x), with the removable limit at x=1."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 1.0):
            raise DomainError("dF is defined for x >= 1")
        t = np.log(x)
        # (1 - e^{-t})/t -> 1 - t/2 + t^2/6 near t = 0
        w = np.where(
            t < 1e-6,
            1.0 - t / 2.0 + t * t / 6.0,
            np.where(t > 0, -np.expm1(-t) / np.where(t > 0, t, 1.0), 1.0),
        )
        return w * self.f0_prime(x)

    def partial_mellin(self, s, x):
        """integral_1^x y^{-s} dF(y) in closed form (s may be complex).

        s = 0 recovers F(x); the x -> infinity limit (Re s > 1) is the full
        Mellin transform handled by the zeta module.
        """
        x = np.asarray(x, dtype=float)
        if np.any(x < 1.0):
            raise DomainError("partial Mellin transform needs x >= 1")
        return self._ein_sum(np.log(x), shift=complex(s))

    def log_weighted_integral(self, x):
        """integral_1^x log y dF(y) = integral_1^x (1 - 1/y) f0'(y) dy, closed form.

        This is the expected value of theta(x) for a sampler tracking F.
        """
        return self._expected_theta_terms(x, smooth_only=False)

    def _expected_theta_terms(self, x, smooth_only: bool):
        x = np.asarray(x, dtype=float)
        if np.any(x < 1.0):
            raise DomainError("x >= 1 required")

        def term(c, w):
            # integral_1^x c (y^w - y^{w-1}) dy
            wp1 = w + 1.0
            if abs(wp1) < 1e-14:
                hi = np.log(x)
            else:
                hi = (x**wp1 - 1.0) / wp1
            if abs(w) < 1e-14:
                lo = np.log(x)
            else:
                lo = (x**w - 1.0) / w
            return c * (hi - lo)

        tot = np.zeros(x.shape, dtype=float)
        for c, w in zip(self._cr, self._wr):
            tot = tot + np.real(term(c, complex(w)))
        if not smooth_only and len(self._cp):
            xx = x.astype(complex)
            for c, w in zip(self._cp, self._wp):
                wp1 = w + 1.0
                hi = (xx**wp1 - 1.0) / wp1
                lo = (xx**w - 1.0) / w
                tot = tot + 2.0 * np.real(c * (hi - lo))
        return tot

    def expected_theta(self, x):
        """Expected theta(x) under the density: integral_1^x log y dF."""
        return self._expected_theta_terms(x, smooth_only=False)

    def expected_theta_smooth(self, x):
        """Expected theta with the oscillatory zero terms removed."""
        return self._expected_theta_terms(x, smooth_only=True)

    def zero_oscillation(self, x):
        """Leading zero oscillation -sum_rho x^rho/rho (conjugates combined)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=float)
        for b, g, mult in self.zeros.zeros:
            if g == 0:
                out -= mult * x**b / b
            else:
                rho = complex(b, g)
                out -= mult * 2.0 * x**b * np.cos(g * np.log(x) - np.angle(rho)) / abs(rho)
        return out


class CachedF:
    """F with a geometric node cache for fast monotone inversion.

    Nodes resolve the fastest zero oscillation (so a cubic Hermite start is
    within a fraction of an oscillation period); inversion then polishes with
    safeguarded Newton steps on the exact closed-form F.  Thread-safe for
    concurrent reads once constructed (arrays are immutable afterwards).
    """

    def __init__(self, dens: TargetDensity, x_max: float, nodes_per_period: int = 24):
        self.dens = dens
        self.x_max = float(x_max)
        t_max = math.log(self.x_max) * 1.0000001
        gamma = dens.max_gamma
        n = 4097
        if gamma > 0:
            periods = gamma * t_max / (2.0 * math.pi)
            n = max(n, int(nodes_per_period * periods) + 2)
        self.t_nodes = np.linspace(0.0, t_max, n)
        x_nodes = np.exp(self.t_nodes)
        self.F_nodes = dens.F(x_nodes)
        # dF/dt = x * F'(x)
        self.dFdt_nodes = x_nodes * dens.F_density(x_nodes)

    def F(self, x):
        return self.dens.F(x)

    def invert(self, levels, newton_iters: int = 3, xtol: float = 1e-9):
        """x with F(x) = level for each level (vectorized, monotone).

        Hermite start from the node cache, then safeguarded Newton on the
        exact F; flat stretches resolve to the left endpoint by construction
        of the bracketing.  ``xtol`` is an absolute x tolerance (clamped below
        by a few ulps of x).
        """
        levels = np.asarray(levels, dtype=float)
        if np.any(levels < 0) or np.any(levels > self.F_nodes[-1]):
            raise DomainError("level outside [0, F(x_max)]")
        idx = np.clip(np.searchsorted(self.F_nodes, levels), 1, len(self.F_nodes) - 1)
        t0 = self.t_nodes[idx - 1]
        t1 = self.t_nodes[idx]
        f0 = self.F_nodes[idx - 1]
        f1 = self.F_nodes[idx]
        d0 = self.dFdt_nodes[idx - 1]
        d1 = self.dFdt_nodes[idx]
        h = t1 - t0
        # invert the cubic Hermite on each bracket by bisection in t (cheap,
        # branch-free, and immune to non-monotone interpolants)
        lo = np.zeros_like(levels)
        hi = np.ones_like(levels)
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            s2 = mid * mid
            s3 = s2 * mid
            val = (
                (2 * s3 - 3 * s2 + 1) * f0
                + (s3 - 2 * s2 + mid) * h * d0
                + (-2 * s3 + 3 * s2) * f1
                + (s3 - s2) * h * d1
            )
            gt = val > levels
            hi = np.where(gt, mid, hi)
            lo = np.where(gt, lo, mid)
        t = t0 + 0.5 * (lo + hi) * h
        x = np.exp(t)
        # Newton polish on the exact F with bracket safeguard
        blo = np.exp(t0)
        bhi = np.exp(t1)
        for _ in range(newton_iters):
            fx = self.dens.F(x) - levels
            neg = fx < 0
            blo = np.where(neg, x, blo)
            bhi = np.where(neg, bhi, x)
            dfx = self.dens.F_density(x)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(dfx > 0, fx / np.where(dfx > 0, dfx, 1.0), 0.0)
            xn = x - step
            bad = ~((xn > blo) & (xn < bhi))
            xn = np.where(bad, 0.5 * (blo + bhi), xn)
            if np.all(np.abs(xn - x) <= np.maximum(xtol, 8 * np.spacing(x))):
                x = xn
                break
            x = xn
        return x
