"""Sparse odd sine polynomials S(y) = 2 sum_k sin((2 n_k + 1) y)/(2 n_k + 1).

The fundamental index n_0 = 0 is mandatory.  The interesting question is how
small the sup norm can be made by choosing the remaining indices: consecutive
indices plateau at the square-wave overshoot constant (~1.8519) while the
limit function has norm pi/2, and suitable sparse sets land in between.  Two
search strategies are provided: a deterministic sweep over sets of odd
numbers with only small prime factors, and seeded simulated annealing over
index subsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._special import golden_max, kahan_sum
from .errors import BudgetError, DomainError

_SMALL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


@dataclass(frozen=True)
class SinePolynomial:
    """Frequency indices n_0 < n_1 < ... (frequencies 2 n_k + 1) plus an
    optional certified sup norm and the grid size used to certify it."""

    indices: tuple
    certified_norm: float | None = None
    certification_grid: int | None = None

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx or idx[0] != 0:
            raise DomainError("the fundamental index n_0 = 0 is required")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise DomainError("indices must be strictly increasing")
        if any(i < 0 for i in idx):
            raise DomainError("indices must be nonnegative")
        object.__setattr__(self, "indices", idx)

    @property
    def frequencies(self) -> np.ndarray:
        return 2 * np.asarray(self.indices) + 1

    @property
    def top_frequency(self) -> int:
        return 2 * self.indices[-1] + 1

    def serialize(self) -> str:
        norm = "" if self.certified_norm is None else repr(float(self.certified_norm))
        grid = "" if self.certification_grid is None else str(self.certification_grid)
        return f"indices={','.join(map(str, self.indices))}; norm={norm}; grid={grid}"

    @staticmethod
    def deserialize(line: str) -> "SinePolynomial":
        fields = {}
        for part in line.strip().split(";"):
            part = part.strip()
            if not part:
                continue
            key, _, val = part.partition("=")
            fields[key.strip()] = val.strip()
        idx = tuple(int(t) for t in fields["indices"].split(",") if t)
        norm = float(fields["norm"]) if fields.get("norm") else None
        grid = int(fields["grid"]) if fields.get("grid") else None
        return SinePolynomial(idx, norm, grid)


def eval_poly(poly: SinePolynomial, y: float) -> float:
    """S(y) at a single point via compensated summation."""
    return 2.0 * kahan_sum(math.sin((2 * n + 1) * y) / (2 * n + 1) for n in poly.indices)


def eval_poly_array(poly: SinePolynomial, y) -> np.ndarray:
    """S on an array of points (pairwise-summed, adequate for certification)."""
    y = np.asarray(y, dtype=float)
    freq = poly.frequencies.astype(float)
    return 2.0 * (np.sin(np.multiply.outer(y, freq)) / freq).sum(axis=1)


def sup_norm(poly: SinePolynomial, grid: int | None = None, _budget=None) -> SinePolynomial:
    """Certify the sup norm of |S| on [0, pi/2] (global by oddness and the
    reflection S(pi - y) = S(y)).

    A dense grid (at least 16 points per top-frequency Nyquist interval)
    locates every candidate local maximum of |S|; golden-section refinement
    sharpens each.  Returns a copy of the polynomial with ``certified_norm``
    and ``certification_grid`` set.
    """
    min_grid = 16 * poly.top_frequency
    if grid is None:
        grid = min_grid
    if grid < min_grid:
        raise DomainError(
            f"certification grid {grid} too coarse for top frequency "
            f"{poly.top_frequency}; need at least {min_grid} points"
        )
    y = np.linspace(0.0, math.pi / 2.0, grid)
    vals = np.abs(eval_poly_array(poly, y))
    if _budget is not None:
        _budget.spend(grid)
    interior = np.zeros(len(y), dtype=bool)
    interior[1:-1] = (vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])
    interior[0] = vals[0] >= vals[1]
    interior[-1] = vals[-1] >= vals[-2]
    best = float(vals.max())
    h = y[1] - y[0]
    freq = poly.frequencies.astype(float)

    def absS(t: float) -> float:
        return abs(2.0 * float(np.sum(np.sin(freq * t) / freq)))

    cand = np.flatnonzero(interior)
    for i in cand:
        a = max(0.0, y[i] - h)
        b = min(math.pi / 2.0, y[i] + h)
        x, fx = golden_max(absS, a, b, tol=1e-13)
        if _budget is not None:
            _budget.spend(64)
        if fx > best:
            best = fx
    return replace(poly, certified_norm=best, certification_grid=grid)


def smooth_index_polynomial(smoothness: int, cutoff: int) -> SinePolynomial:
    """Polynomial whose frequencies are the odd m <= 2*cutoff + 1 with every
    prime factor <= smoothness, mapped back to indices n = (m-1)/2."""
    if smoothness < 3:
        raise DomainError("smoothness must be at least 3")
    if cutoff < 1:
        raise DomainError("cutoff must be at least 1")
    indices = []
    for m in range(1, 2 * cutoff + 2, 2):
        mm = m
        for p in _SMALL_PRIMES:
            if p > smoothness:
                break
            while mm % p == 0:
                mm //= p
        if mm == 1:
            indices.append((m - 1) // 2)
    return SinePolynomial(tuple(indices))


class _EvalBudget:
    def __init__(self, limit: int):
        self.limit = int(limit)
        self.used = 0

    def spend(self, n: int):
        self.used += int(n)
        if self.used > self.limit:
            raise BudgetError(f"evaluation budget {self.limit} exhausted")

    @property
    def remaining(self) -> int:
        return self.limit - self.used


@dataclass
class SearchResult:
    """Outcome of a low-norm search; ``success`` distinguishes a certified hit
    from a best-effort failure (the best polynomial found is always present)."""

    success: bool
    polynomial: SinePolynomial
    target: float
    evaluations: int
    strategy: str
    message: str = ""


_SMOOTH_CUTOFFS = (2, 3, 4, 6, 8, 11, 13, 16, 18, 22, 24, 27, 31, 36, 40, 45, 52, 60, 72, 90, 121)


def search_low_norm(
    epsilon: float,
    strategy: str = "smooth",
    seed: int = 0,
    budget: int = 10**6,
) -> SearchResult:
    """Search for a polynomial with certified sup norm <= pi/2 + epsilon.

    ``budget`` caps the total number of pointwise S(y) evaluations spent on
    certification.  Failure is reported explicitly (never silently) with the
    best candidate found.
    """
    if not (0.0 < epsilon < 0.5):
        raise DomainError("epsilon must lie in (0, 0.5)")
    if strategy not in ("smooth", "anneal"):
        raise DomainError(f"unknown strategy {strategy!r}")
    target = math.pi / 2.0 + epsilon
    budget_ = _EvalBudget(budget)
    best: SinePolynomial | None = None

    def consider(poly: SinePolynomial) -> SinePolynomial:
        nonlocal best
        certified = sup_norm(poly, _budget=budget_)
        if best is None or certified.certified_norm < best.certified_norm:
            best = certified
        return certified

    try:
        if strategy == "smooth":
            for cutoff in _SMOOTH_CUTOFFS:
                for P in _SMALL_PRIMES:
                    if P > 2 * cutoff + 1:
                        break
                    cand = smooth_index_polynomial(P, cutoff)
                    if len(cand.indices) < 2:
                        continue
                    certified = consider(cand)
                    if certified.certified_norm <= target:
                        return SearchResult(True, certified, target, budget_.used, strategy)
        else:
            rng = np.random.default_rng(seed)
            cap = 48
            current = {0, 1, 2, 4, 7}
            cur = consider(SinePolynomial(tuple(sorted(current))))
            cur_norm = cur.certified_norm
            temp = 0.08
            while True:
                cand_set = set(current)
                j = int(rng.integers(1, cap))
                if j in cand_set and len(cand_set) > 2:
                    cand_set.discard(j)
                else:
                    cand_set.add(j)
                cand = consider(SinePolynomial(tuple(sorted(cand_set))))
                if best.certified_norm <= target:
                    return SearchResult(True, best, target, budget_.used, strategy)
                accept = cand.certified_norm < cur_norm or rng.random() < math.exp(
                    (cur_norm - cand.certified_norm) / max(temp, 1e-9)
                )
                if accept:
                    current, cur_norm = cand_set, cand.certified_norm
                temp *= 0.995
    except BudgetError:
        pass
    if best is not None and best.certified_norm <= target:
        return SearchResult(True, best, target, budget_.used, strategy)
    fallback = best if best is not None else sup_norm(SinePolynomial((0,)))
    return SearchResult(
        False,
        fallback,
        target,
        budget_.used,
        strategy,
        message=f"budget {budget} exhausted; best certified norm "
        f"{fallback.certified_norm:.6f} > target {target:.6f}",
    )
