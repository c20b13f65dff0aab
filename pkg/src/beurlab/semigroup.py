"""Free-commutative-semigroup enumeration and the Chebyshev summatory tables.

Norm enumeration walks a min-heap of states (v, i, b) where v = b * p_i is a
log-norm, i its largest prime index, and b the log-norm it extends; a state
spawns its first child (v * p_i, i, v) and its next sibling
(b * p_{i+1}, i+1, b).  Every canonical nondecreasing factorization is
reached exactly once, so no hash table is needed and memory stays O(heap
frontier).  Everything runs in log space: accumulated log drift at feasible
depths stays below 2^-40 relative, safely under the interleaving tolerance
of the counting grid.

psi/theta/Pi need only the prime list, so they scale far beyond the
enumeration cutoff; N(x) requires the heap walk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import BudgetError, DomainError
from .prime_sampler import PrimeSystem

DEFAULT_MEMORY_BUDGET = 200_000_000  # collected norms, ~1.6 GB of f8
DEFAULT_GRID_RATIO = 1.05


@njit(cache=True)
def _stream_chunk(logp, X_log, hv, hi, hb, n, buf):
    """Emit up to len(buf) log-norms in ascending order; resumable.

    The caller guarantees heap capacity >= n + len(buf) + 2.  Returns the new
    heap size and the number of norms written to buf.
    """
    np_ = logp.shape[0]
    cap = buf.shape[0]
    emitted = 0
    while n > 0 and emitted < cap:
        v = hv[0]
        i = hi[0]
        b = hb[0]
        buf[emitted] = v
        emitted += 1
        n -= 1
        hv[0] = hv[n]
        hi[0] = hi[n]
        hb[0] = hb[n]
        j = 0
        while True:
            l = 2 * j + 1
            if l >= n:
                break
            r = l + 1
            m = l
            if r < n and hv[r] < hv[l]:
                m = r
            if hv[m] < hv[j]:
                hv[j], hv[m] = hv[m], hv[j]
                hi[j], hi[m] = hi[m], hi[j]
                hb[j], hb[m] = hb[m], hb[j]
                j = m
            else:
                break
        c1 = v + logp[i]
        if c1 <= X_log:
            hv[n] = c1
            hi[n] = i
            hb[n] = v
            j = n
            n += 1
            while j > 0:
                p = (j - 1) >> 1
                if hv[j] < hv[p]:
                    hv[j], hv[p] = hv[p], hv[j]
                    hi[j], hi[p] = hi[p], hi[j]
                    hb[j], hb[p] = hb[p], hb[j]
                    j = p
                else:
                    break
        if i + 1 < np_:
            c2 = b + logp[i + 1]
            if c2 <= X_log:
                hv[n] = c2
                hi[n] = i + 1
                hb[n] = b
                j = n
                n += 1
                while j > 0:
                    p = (j - 1) >> 1
                    if hv[j] < hv[p]:
                        hv[j], hv[p] = hv[p], hv[j]
                        hi[j], hi[p] = hi[p], hi[j]
                        hb[j], hb[p] = hb[p], hb[j]
                        j = p
                    else:
                        break
    return n, emitted


class NormStream:
    """Resumable ascending stream of semigroup log-norms up to X."""

    def __init__(self, ps: PrimeSystem, X: float, chunk: int = 1 << 20):
        if X < 1.0:
            raise DomainError("X must be >= 1")
        if X > ps.x_max**2:
            raise DomainError("X beyond x_max^2 would need primes past the sampling cutoff")
        self.X_log = math.log(X)
        logp = ps.log_primes
        self.logp = logp[logp <= self.X_log].copy()
        self.chunk = int(chunk)
        cap = max(4 * self.chunk, 1 << 16)
        self._hv = np.empty(cap, dtype=np.float64)
        self._hi = np.empty(cap, dtype=np.int32)
        self._hb = np.empty(cap, dtype=np.float64)
        self._n = 0
        self._started = False
        self.emitted = 0
        self.peak_heap = 0

    def _ensure_capacity(self):
        need = self._n + self.chunk + 2
        if need > len(self._hv):
            new = max(need, 2 * len(self._hv))
            self._hv = np.resize(self._hv, new)
            self._hi = np.resize(self._hi, new)
            self._hb = np.resize(self._hb, new)

    def __iter__(self):
        return self

    def __next__(self) -> np.ndarray:
        """Next ascending chunk of log-norms (the first chunk starts with
        log 1 = 0.0 for the empty product)."""
        if not self._started:
            self._started = True
            if len(self.logp) and self.logp[0] <= self.X_log:
                self._hv[0] = self.logp[0]
                self._hi[0] = 0
                self._hb[0] = 0.0
                self._n = 1
            self.emitted = 1
            return np.zeros(1)
        if self._n == 0:
            raise StopIteration
        self._ensure_capacity()
        buf = np.empty(self.chunk, dtype=np.float64)
        self._n, k = _stream_chunk(
            self.logp, self.X_log, self._hv, self._hi, self._hb, self._n, buf
        )
        self.peak_heap = max(self.peak_heap, self._n)
        self.emitted += k
        if k == 0:
            raise StopIteration
        return buf[:k]


@dataclass
class IntegerCounts:
    """N(x) sampled on an increasing grid, plus the enumeration cutoff."""

    grid: np.ndarray
    N_values: np.ndarray
    X_cut: float
    norms: np.ndarray | None = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.N_values = np.asarray(self.N_values, dtype=np.int64)
        if np.any(np.diff(self.grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        if np.any(np.diff(self.N_values) < 0):
            raise DomainError("N must be nondecreasing")


def default_grid(X: float, ratio: float = DEFAULT_GRID_RATIO, lo: float = 2.0) -> np.ndarray:
    """Geometric grid from lo to X; default ratio 1.05 resolves x^{i gamma}
    oscillation up to |gamma| ~ 60 (use finer for larger)."""
    npts = int(math.ceil(math.log(X / lo) / math.log(ratio))) + 1
    return np.geomspace(lo, X, max(npts, 2))


def enumerate_norms(
    ps: PrimeSystem,
    X: float,
    mode: str = "stream",
    grid: np.ndarray | None = None,
    consumer=None,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    chunk: int = 1 << 20,
) -> IntegerCounts:
    """Enumerate all semigroup norms <= X in ascending order.

    stream mode counts into ``grid`` (and forwards each ascending chunk of
    norms to ``consumer`` if given) holding only O(heap frontier) memory;
    collect mode additionally stores the full norm array, refusing up front
    when a cheap linear projection of the count exceeds ``memory_budget``.
    """
    if mode not in ("stream", "collect"):
        raise DomainError(f"unknown mode {mode!r}")
    if grid is None:
        grid = default_grid(max(X, 2.0000001))
    grid = np.asarray(grid, dtype=float)
    if np.any(grid > X):
        raise DomainError("grid points beyond the enumeration cutoff X")
    grid_log = np.log(grid)

    if mode == "collect" and X > 4.0:
        # projection pass at X/16: N grows ~ linearly in X under the density
        # hypothesis, so extrapolate and refuse before burning memory
        probe = enumerate_norms(ps, max(X / 16.0, 2.0), mode="stream",
                                grid=np.asarray([max(X / 16.0, 2.0)]), chunk=chunk)
        projected = 16 * int(probe.N_values[-1])
        if projected > memory_budget:
            raise BudgetError(
                f"projected ~{projected} norms exceeds the collect budget "
                f"{memory_budget}; use stream mode"
            )

    counts = np.zeros(len(grid), dtype=np.int64)
    collected = [] if mode == "collect" else None
    stream = NormStream(ps, X, chunk=chunk)
    total = 0
    for lognorms in stream:
        counts += np.searchsorted(lognorms, grid_log, side="right")
        total += len(lognorms)
        if collected is not None:
            if total > memory_budget:
                raise BudgetError(
                    f"collected {total} norms exceeds budget {memory_budget}; use stream mode"
                )
            collected.append(np.exp(lognorms))
        if consumer is not None:
            consumer(np.exp(lognorms))
    norms = np.concatenate(collected) if collected is not None else None
    return IntegerCounts(grid=grid, N_values=counts, X_cut=float(X), norms=norms)


# ---------------------------------------------------------------------------
# Chebyshev summatory functions (prime data only; no enumeration needed)
# ---------------------------------------------------------------------------


@dataclass
class SummaryTables:
    grid: np.ndarray
    psi: np.ndarray
    theta: np.ndarray
    Pi: np.ndarray
    Delta: np.ndarray
    kappa_hat: float | None = None
    theta_hat: float | None = None
    A_hat: float | None = None


def theta_values(ps: PrimeSystem, x) -> np.ndarray:
    """theta(x) = sum_{p <= x} log p (vectorized over x)."""
    x = np.asarray(x, dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(ps.log_primes)])
    return cum[np.searchsorted(ps.primes, x, side="right")]


def _power_iteration_count(ps: PrimeSystem, x_max_grid: float) -> int:
    if len(ps) == 0:
        return 1
    return max(1, int(math.floor(math.log(x_max_grid) / math.log(ps.primes[0]))))


def psi_values(ps: PrimeSystem, x) -> np.ndarray:
    """psi(x) = sum_{p^k <= x} log p, via psi(x) = sum_k theta(x^{1/k})."""
    x = np.asarray(x, dtype=float)
    if len(ps) == 0:
        return np.zeros_like(x)
    out = np.zeros_like(x)
    kmax = _power_iteration_count(ps, float(np.max(x)) if x.size else 1.0)
    for k in range(1, kmax + 1):
        roots = x ** (1.0 / k)
        if np.all(roots < ps.primes[0]):
            break
        out += theta_values(ps, roots)
    return out


def Pi_values(ps: PrimeSystem, x) -> np.ndarray:
    """Pi(x) = sum_{k >= 1} pi(x^{1/k})/k (finite sum)."""
    x = np.asarray(x, dtype=float)
    if len(ps) == 0:
        return np.zeros_like(x)
    out = np.zeros_like(x)
    kmax = _power_iteration_count(ps, float(np.max(x)) if x.size else 1.0)
    for k in range(1, kmax + 1):
        roots = x ** (1.0 / k)
        if np.all(roots < ps.primes[0]):
            break
        out += ps.pi(roots) / k
    return out


def chebyshev_tables(ps: PrimeSystem, grid) -> SummaryTables:
    """psi, theta, Pi, Delta = psi - x on a grid inside (1, x_max]."""
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 1.0):
        raise DomainError("grid points must exceed 1")
    if np.any(grid > ps.x_max):
        raise DomainError("grid point beyond x_max: primes past the cutoff are unknown")
    psi = psi_values(ps, grid)
    return SummaryTables(
        grid=grid,
        psi=psi,
        theta=theta_values(ps, grid),
        Pi=Pi_values(ps, grid),
        Delta=psi - grid,
    )


# ---------------------------------------------------------------------------
# Density-hypothesis fit: N(x) ~ kappa (x - 1) + O(x^theta)
# ---------------------------------------------------------------------------


@dataclass
class AxiomAFit:
    kappa_hat: float
    theta_hat: float
    A_hat: float
    degenerate: bool = False


def axiom_a_fit(counts: IntegerCounts) -> AxiomAFit:
    """Fit kappa, theta, A from sampled N(x).

    kappa is the least-squares slope of N against (x - 1) over the top decade;
    theta the slope of the upper envelope of log |R| (per-half-decade maxima)
    against log x; A the max of |R|/x^theta over the grid.  A residual that is
    identically ~0 yields theta = 0 with the degenerate flag set.
    """
    x = counts.grid
    N = counts.N_values.astype(float)
    if x[-1] / x[0] < 1e3:
        raise DomainError("fit needs a grid spanning at least 3 decades")
    top = x >= x[-1] / 10.0
    xm1 = x[top] - 1.0
    kappa = float(np.dot(N[top], xm1) / np.dot(xm1, xm1))
    R = N - kappa * (x - 1.0)
    absR = np.abs(R)
    if absR.max() <= 1e-9 * max(1.0, N.max()):
        return AxiomAFit(kappa_hat=kappa, theta_hat=0.0, A_hat=0.0, degenerate=True)
    # per-half-decade envelope maxima
    logx = np.log10(x)
    bins = np.floor((logx - logx[0]) / 0.5).astype(int)
    env_x, env_R = [], []
    for b in np.unique(bins):
        sel = bins == b
        i = np.argmax(absR[sel])
        env_x.append(x[sel][i])
        env_R.append(absR[sel][i])
    env_x = np.asarray(env_x)
    env_R = np.asarray(env_R)
    keep = env_R > 0
    if keep.sum() < 2:
        return AxiomAFit(kappa_hat=kappa, theta_hat=0.0, A_hat=float(absR.max()), degenerate=True)
    slope, _ = np.polyfit(np.log(env_x[keep]), np.log(env_R[keep]), 1)
    theta = float(slope)
    A = float(np.max(absR / x**theta))
    return AxiomAFit(kappa_hat=kappa, theta_hat=theta, A_hat=A)


def fitted_tables(ps: PrimeSystem, counts: IntegerCounts, grid=None) -> SummaryTables:
    """Convenience: Chebyshev tables on the counts grid plus the fitted
    density-hypothesis parameters."""
    grid = counts.grid if grid is None else np.asarray(grid, dtype=float)
    tab = chebyshev_tables(ps, grid)
    fit = axiom_a_fit(counts)
    tab.kappa_hat = fit.kappa_hat
    tab.theta_hat = fit.theta_hat
    tab.A_hat = fit.A_hat
    return tab
