"""Effective simultaneous Diophantine approximation over integer windows.

Implements the explicit Kronecker-type bound

    inf_{t in [T1, T2]}  sum_j delta_j ||lambda_j t - alpha_j||^2
        <= Delta/4 sin^2(pi / (2(M+1))) + Delta M^n / (8 (T2 - T1) Lambda),

an exhaustive integer scan attaining the infimum, and the homogeneous
window search that finds h in [a, a+T] with sum_k ||h d_k||^2 <= n/omega.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, JointZetaError

INTEGRALITY_TOL = 1e-9
ENUM_BUDGET = 35.0          # max of n * log(2M + 1)
SCAN_BUDGET = 10 ** 8       # max window length for exhaustive scans
CHUNK = 1 << 20


def dist_to_int(x):
    """||x||, distance to the nearest integer (works on arrays)."""
    return np.abs(x - np.round(x))


@dataclass(frozen=True)
class KroneckerInstance:
    lambdas: tuple
    alphas: tuple
    weights: tuple
    coeff_bound: int
    window: tuple

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lambdas)
        alp = tuple(float(x) for x in self.alphas)
        w = tuple(float(x) for x in self.weights)
        if not lam or not len(lam) == len(alp) == len(w):
            raise ValueError("lambdas, alphas and weights need a common length n >= 1")
        if any(x <= 0 for x in w):
            raise ValueError("weights must be positive")
        if int(self.coeff_bound) < 1:
            raise ValueError("coeff_bound must be a positive integer")
        T1, T2 = (int(x) for x in self.window)
        if not T1 < T2:
            raise ValueError("window needs T1 < T2")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "alphas", alp)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "coeff_bound", int(self.coeff_bound))
        object.__setattr__(self, "window", (T1, T2))

    @classmethod
    def homogeneous(cls, lambdas, coeff_bound, window, weights=None):
        n = len(lambdas)
        return cls(tuple(lambdas), (0.0,) * n, tuple(weights or (1.0,) * n), coeff_bound, window)

    @property
    def n(self):
        return len(self.lambdas)

    @property
    def is_homogeneous(self):
        return all(float(a).is_integer() for a in self.alphas)


@dataclass(frozen=True)
class KroneckerSolution:
    t_star: int
    objective: float
    bound: float
    Delta: float
    Lambda: float
    certified: bool = False


def _check_enum_budget(n, M):
    if n * math.log(2 * M + 1) > ENUM_BUDGET:
        raise BudgetError(f"enumeration of (2*{M}+1)^{n} coefficient vectors exceeds budget")


def _combos(lams, M):
    """All sums u . lams with |u_j| <= M, as a flat array."""
    vals = np.zeros(1)
    u = np.arange(-M, M + 1, dtype=np.float64)
    for lam in lams:
        vals = (vals[:, None] + u[None, :] * lam).ravel()
    return vals


def lambda_min(lambdas, coeff_bound: int, tol: float = INTEGRALITY_TOL) -> float:
    """min |sum u_j lambda_j| over |u_j| <= M with a non-integral sum; inf if none.

    Meet in the middle: the coefficient vectors are split into two halves,
    one side is sorted and each value of the other side looks up its
    nearest admissible partner.
    """
    lams = [float(x) for x in lambdas]
    M = int(coeff_bound)
    _check_enum_budget(len(lams), M)
    h = len(lams) // 2
    A = _combos(lams[:h], M)
    B = np.sort(_combos(lams[h:], M))
    best = math.inf
    for lo in range(0, A.size, CHUNK):
        a = A[lo:lo + CHUNK]
        # partners with a + b strictly outside (-tol, tol)
        left = np.searchsorted(B, -a - tol, side="left") - 1
        right = np.searchsorted(B, -a + tol, side="right")
        for idx, step in ((left, -1), (right, 1)):
            valid = (idx >= 0) & (idx < B.size)
            s = np.full(a.size, np.inf)
            s[valid] = a[valid] + B[idx[valid]]
            bad = valid & (dist_to_int(np.where(valid, s, 0.5)) <= tol)
            # rare: partner lands on a non-zero integer; walk further out
            for i in np.flatnonzero(bad):
                j = idx[i] + step
                s[i] = np.inf
                while 0 <= j < B.size:
                    v = a[i] + B[j]
                    if dist_to_int(v) > tol:
                        s[i] = v
                        break
                    j += step
            m = np.abs(s).min(initial=math.inf)
            best = min(best, float(m))
    return best


def chen_bound(instance: KroneckerInstance, Lambda: float | None = None) -> float:
    if Lambda is None:
        Lambda = lambda_min(instance.lambdas, instance.coeff_bound)
    M, n = instance.coeff_bound, instance.n
    Delta = sum(instance.weights)
    T1, T2 = instance.window
    first = Delta / 4 * math.sin(math.pi / (2 * (M + 1))) ** 2
    if math.isinf(Lambda):
        return first
    return first + Delta * M ** n / (8 * (T2 - T1) * Lambda)


def objective_values(ts: np.ndarray, lambdas, alphas, weights) -> np.ndarray:
    """sum_j delta_j ||lambda_j t - alpha_j||^2, accumulated in j order."""
    ts = np.asarray(ts, dtype=np.float64)
    out = np.zeros(ts.shape)
    for lam, alp, w in zip(lambdas, alphas, weights):
        out += w * dist_to_int(lam * ts - alp) ** 2
    return out


def _scan(lo: int, hi: int, lambdas, alphas, weights):
    """(t, value) of the smallest minimiser over integers lo..hi."""
    best_t, best_v = lo, math.inf
    for start in range(lo, hi + 1, CHUNK):
        ts = np.arange(start, min(hi, start + CHUNK - 1) + 1, dtype=np.int64)
        v = objective_values(ts, lambdas, alphas, weights)
        i = int(np.argmin(v))
        if v[i] < best_v:
            best_t, best_v = int(ts[i]), float(v[i])
    return best_t, best_v


def chen_search(instance: KroneckerInstance, hypothesis: bool | None = None) -> KroneckerSolution:
    """Exact minimiser over the integer window, with Chen's bound attached.

    ``hypothesis`` asserts Chen's integrality condition on the alphas;
    it is automatically true for homogeneous instances.  When it holds, the
    bound is checked and a violation raises.
    """
    T1, T2 = instance.window
    if T2 - T1 > SCAN_BUDGET:
        raise BudgetError(f"window of length {T2 - T1} exceeds scan budget {SCAN_BUDGET}")
    t_star, obj = _scan(T1, T2, instance.lambdas, instance.alphas, instance.weights)
    Delta = sum(instance.weights)
    try:
        Lambda = lambda_min(instance.lambdas, instance.coeff_bound)
        bound = chen_bound(instance, Lambda)
    except BudgetError:
        Lambda, bound = math.nan, math.nan
    if hypothesis is None:
        hypothesis = instance.is_homogeneous
    certified = bool(hypothesis and not math.isnan(bound) and obj <= bound + 1e-12)
    if hypothesis and not math.isnan(bound) and not certified:
        raise JointZetaError(f"objective {obj} exceeds bound {bound}: hypothesis does not hold")
    return KroneckerSolution(t_star, obj, bound, Delta, Lambda, certified)


def corollary_M(omega: float) -> int:
    """Coefficient bound M = pi*omega/4 - 1, rounded up so sin^2 term <= 2/omega."""
    return max(1, math.ceil(math.pi * omega / 4 - 1 - 1e-12))


def corollary_T(shifts, omega: float) -> int:
    """Window length after which Chen's bound guarantees sum ||h d_k||^2 <= n/omega."""
    d = list(shifts)
    M = corollary_M(omega)
    Lam = lambda_min(d, M)
    if math.isinf(Lam):
        return 1
    return max(1, math.ceil(omega * M ** len(d) / (4 * Lam)))


def homogeneous_window(shifts, omega: float, a: int, max_window: int = SCAN_BUDGET):
    """Smallest h >= a with sum ||h d_k||^2 <= n/omega; window grown by doubling.

    Returns (h, T_used) with h in [a, a + T_used].
    """
    if omega < 1:
        raise ValueError("omega must be >= 1")
    d = [float(x) for x in shifts]
    n = len(d)
    if n * math.log(2 * math.ceil(math.pi * omega / 4)) > ENUM_BUDGET:
        raise BudgetError("omega too large for the enumeration budget")
    target = n / omega
    ones = (1.0,) * n
    zeros = (0.0,) * n
    a = int(a)
    T, done = 1, a - 1
    T_cap = None
    while True:
        # only the new part of the window needs scanning
        for start in range(done + 1, a + T + 1, CHUNK):
            ts = np.arange(start, min(a + T, start + CHUNK - 1) + 1, dtype=np.int64)
            hit = np.flatnonzero(objective_values(ts, d, zeros, ones) <= target)
            if hit.size:
                return int(ts[hit[0]]), T
        done = a + T
        if T_cap is None and T >= 1 << 16:
            T_cap = corollary_T(d, omega)
        if T_cap is not None and T >= T_cap:
            raise JointZetaError(f"no h within T = {T} >= Chen window {T_cap}")
        T *= 2
        if T > max_window:
            raise BudgetError(f"window grew past {max_window} without success")
