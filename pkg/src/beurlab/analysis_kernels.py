"""Small, independently testable analytic kernels.

Three pieces: the closed-form Gaussian vertical-line integral, numeric
verification of a trio of auxiliary inequalities, and the grid-refined
maximum of a damped power sum whose first k terms are 1 (the quantity the
power-sum lower bound certifies from below).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._special import golden_max
from .errors import DomainError


def gaussian_line_integral(a: float, b: complex) -> complex:
    """(1/2 pi i) * integral over a vertical line of exp(a s^2 + b s) ds.

    Equals exp(-b^2/(4a)) / (2 sqrt(pi a)) independently of the line's real
    abscissa.  Requires a > 0 (the integrand must decay along the line).
    """
    if not a > 0:
        raise DomainError(f"need a > 0, got {a}")
    b = complex(b)
    return cmath.exp(-b * b / (4.0 * a)) / (2.0 * math.sqrt(math.pi * a))


@dataclass(frozen=True)
class PowerSumInstance:
    """k unit terms plus conjugate-closed pairs for the power-sum maximum.

    ``pairs`` lists one member of each conjugate pair (its conjugate is
    implied); entries must carry a principal argument.  The window start is
    H > 0 and the window is [H, (2n+1)H] with n = len(pairs).
    """

    k: int
    pairs: tuple = ()
    H: float = 1.0

    def __post_init__(self):
        if self.k < 0:
            raise DomainError("k must be nonnegative")
        if self.H <= 0:
            raise DomainError("H must be positive")
        ws = tuple(complex(w) for w in self.pairs)
        for w in ws:
            if abs(cmath.phase(w)) > math.pi + 1e-12:
                raise DomainError("pair arguments must be principal")
        object.__setattr__(self, "pairs", ws)

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def term_count(self) -> int:
        return self.k + 2 * len(self.pairs)


def power_sum_value(inst: PowerSumInstance, L):
    """Re sum of the power sum at real exponent L (vectorized over L).

    Unit terms contribute k; a pair (r, alpha) contributes 2 r^L cos(alpha L),
    using the principal-branch power r^L e^{i alpha L}.
    """
    L = np.asarray(L, dtype=float)
    out = np.full(L.shape, float(inst.k))
    for w in inst.pairs:
        r = abs(w)
        alpha = cmath.phase(w)
        out = out + 2.0 * np.power(r, L) * np.cos(alpha * L)
    return out


def cassels_max(inst: PowerSumInstance, grid_density: int = 256):
    """Grid-refined maximum of the power sum over L in [H, (2n+1)H].

    Returns (value, argmax_L).  A uniform grid with ``grid_density`` points
    per unit of L is refined by golden-section search around the three best
    grid points; the power-sum theorem guarantees value >= k up to the grid
    refinement error.
    """
    if inst.term_count == 0:
        raise DomainError("empty instance: no unit terms and no pairs")
    if grid_density < 64:
        raise DomainError("grid_density must be at least 64 points per unit L")
    lo = inst.H
    hi = (2 * inst.n + 1) * inst.H
    if inst.n == 0:
        # window degenerates to the single point L = H
        return float(power_sum_value(inst, lo)), lo
    npts = max(16, int(math.ceil((hi - lo) * grid_density)) + 1)
    L = np.linspace(lo, hi, npts)
    vals = power_sum_value(inst, L)
    best_val = -math.inf
    best_L = lo
    order = np.argsort(vals)[-3:]
    h = L[1] - L[0]
    for i in order:
        a = max(lo, L[i] - h)
        b = min(hi, L[i] + h)
        x, fx = golden_max(lambda t: float(power_sum_value(inst, t)), a, b, tol=1e-12)
        if fx > best_val:
            best_val, best_L = fx, x
    return float(best_val), float(best_L)


# ---------------------------------------------------------------------------
# Inequality checks for the three auxiliary estimates
# ---------------------------------------------------------------------------


def _gauss_tail(B: float) -> float:
    # integral_B^inf e^{-x^2} dx = sqrt(pi)/2 * erfc(B)
    from scipy.special import erfc

    return 0.5 * math.sqrt(math.pi) * erfc(B)


def _abs_cos_gauss(P: float, R: float) -> float:
    # integral over R of |cos(P y + R)| e^{-y^2} dy by panelized quadrature
    # split at the zeros of cos so each panel is smooth
    from scipy.integrate import quad

    lim = 8.0
    zeros = []
    k0 = math.floor((P * (-lim) + R - math.pi / 2) / math.pi)
    k = k0
    while True:
        y = (math.pi / 2 + k * math.pi - R) / P
        if y > lim:
            break
        if y >= -lim:
            zeros.append(y)
        k += 1
    pts = [-lim] + zeros + [lim]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b <= a:
            continue
        val, _ = quad(lambda y: abs(math.cos(P * y + R)) * math.exp(-y * y), a, b, limit=200)
        total += val
    return total


@dataclass
class EstimateItem:
    point: tuple
    lhs: float | None
    rhs: float | None
    holds: bool | None
    skipped: str | None = None


@dataclass
class EstimateReport:
    tail: list
    log_power: list
    cos_average: list

    @property
    def all_hold(self) -> bool:
        items = self.tail + self.log_power + self.cos_average
        checked = [it for it in items if it.skipped is None]
        return bool(checked) and all(it.holds for it in checked)


_LAMBDA_ALPHA = ((1.0, 0.5), (2.0, 0.25), (3.0, 0.75))


def verify_estimate_bounds(sample_grid) -> EstimateReport:
    """Check the three auxiliary inequalities over ``sample_grid``.

    Item 1 (Gaussian tail, needs B >= 1/2):  int_B^inf e^{-x^2} dx < e^{-B^2}.
    Item 2 (log vs power, needs x >= 1):     log^lam x <= e^{lam/alpha + lam^2} x^alpha,
      swept over a fixed set of (lam, alpha) with lam >= 1, 0 < alpha < 1.
    Item 3 (|cos| average, needs P > 0):     int |cos(Py+R)| e^{-y^2} dy <= 2/sqrt(pi) + 2 pi / P,
      at R in {0, 1}.

    Out-of-domain grid points are flagged and left unevaluated.
    """
    tail, logpow, cosavg = [], [], []
    for g in sample_grid:
        g = float(g)
        if g < 0.5:
            tail.append(EstimateItem((g,), None, None, None, "needs B >= 1/2"))
        else:
            lhs = _gauss_tail(g)
            rhs = math.exp(-g * g)
            tail.append(EstimateItem((g,), lhs, rhs, lhs < rhs))
        if g < 1.0:
            logpow.append(EstimateItem((g,), None, None, None, "needs x >= 1"))
        else:
            for lam, alpha in _LAMBDA_ALPHA:
                lhs = math.log(g) ** lam
                rhs = math.exp(lam / alpha + lam * lam) * g**alpha
                logpow.append(EstimateItem((lam, alpha, g), lhs, rhs, lhs <= rhs))
        if g <= 0.0:
            cosavg.append(EstimateItem((g,), None, None, None, "needs P > 0"))
        else:
            for R in (0.0, 1.0):
                lhs = _abs_cos_gauss(g, R)
                rhs = 2.0 / math.sqrt(math.pi) + 2.0 * math.pi / g
                cosavg.append(EstimateItem((g, R), lhs, rhs, lhs <= rhs))
    return EstimateReport(tail, logpow, cosavg)
