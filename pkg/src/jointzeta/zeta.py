"""Riemann zeta by Euler-Maclaurin summation, and a continuous log zeta.

The branch of log zeta(sigma + i t) is the one obtained by continuing the
principal logarithm from real part 3 leftwards along the horizontal segment
at height t.  Along tau grids the same branch is produced by unwrapping
between anchors computed that way, and every unwrapped block is checked
against the anchor at its far end.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import zeta as _hurwitz

from . import _kernels
from .dirichlet import ShiftVector, TauGrid
from .errors import AccuracyError, PoleError, ZeroOnPathError

EPS = np.finfo(float).eps
MAX_CORRECTIONS = 120
BLOCK = 1024
RIGHT_EDGE = 3.0


@dataclass(frozen=True)
class EvalPoint:
    sigma: float
    t: float

    def __post_init__(self):
        if not 0.5 < self.sigma <= 1.0:
            raise ValueError(f"sigma must lie in (1/2, 1], got {self.sigma}")
        if not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t}")

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)

    def __complex__(self) -> complex:
        return self.s

    @classmethod
    def from_complex(cls, s) -> "EvalPoint":
        if isinstance(s, EvalPoint):
            return s
        s = complex(s)
        return cls(s.real, s.imag)


@dataclass(frozen=True)
class LogZetaValue:
    value: complex
    winding: int
    quality: float


@dataclass
class ZeroProximityReport:
    threshold: float
    tau_windows: list = field(default_factory=list)

    @property
    def measure(self) -> float:
        return sum(b - a for a, b in self.tau_windows)


@lru_cache(maxsize=None)
def _bernoulli_ratios(m: int) -> np.ndarray:
    """B_2j / (2j)! for j = 1 .. m, via B_2j = (-1)^(j+1) 2 (2j)! zeta(2j) / (2 pi)^2j."""
    j = np.arange(1, m + 1)
    return (-1.0) ** (j + 1) * 2.0 * _hurwitz(2.0 * j, 1.0) / (2 * np.pi) ** (2.0 * j)


def _tail_bound(s: complex, N: int, m: int) -> float:
    """|s (s+1) ... (s+2m+1) B_{2m+2} N^(-sigma-2m-1)| / ((2m+2)! (sigma+2m+1))."""
    sigma = s.real
    b = abs(_bernoulli_ratios(m + 1)[m])
    logprod = sum(math.log(abs(s + k)) for k in range(2 * m + 2))
    return math.exp(logprod + math.log(b) - (sigma + 2 * m + 1) * math.log(N)) / (sigma + 2 * m + 1)


def em_parameters(s: complex, tol: float = 1e-12) -> tuple[int, int]:
    """Smallest (n_terms, n_corrections) whose tail bound is below ``tol``.

    Used for scans, where the default n_terms = 2|t| of zeta_eval is wasteful:
    n_terms ~ |s|/4 with a few dozen corrections reaches the same accuracy.
    """
    s = complex(s)
    sigma = s.real
    a = abs(s)
    m = np.arange(1, MAX_CORRECTIONS)
    # log |s (s+1) ... (s+2m+1)| for every m at once
    cum = np.cumsum(np.log(np.abs(s + np.arange(2 * MAX_CORRECTIONS + 2))))
    logprod = cum[2 * m + 1]
    logb = np.log(np.abs(_bernoulli_ratios(MAX_CORRECTIONS)))[m]
    log_tol = math.log(tol)
    for c in (0.2, 0.25, 0.3, 0.4, 0.5, 0.75, 1.0, 2.0):
        N = max(10, math.ceil(c * a))
        # terms stop shrinking once 2m is comparable to 2 pi N
        usable = m <= math.pi * N
        logbound = logprod + logb - (sigma + 2 * m + 1) * math.log(N) - np.log(sigma + 2 * m + 1)
        hit = np.flatnonzero(usable & (logbound <= log_tol))
        if hit.size:
            return N, int(m[hit[0]])
    return max(50, math.ceil(2 * a)), 8


def _corrections(s, N: int, m: int):
    """N^(1-s)/(s-1) + N^-s/2 + sum_j B_2j/(2j)! (s)_(2j-1) N^(-s-2j+1); s may be an array."""
    logN = math.log(N)
    Ns = np.exp(-s * logN)
    out = N * Ns / (s - 1) + 0.5 * Ns
    b = _bernoulli_ratios(m)
    P = s * Ns / N
    for j in range(1, m + 1):
        out = out + b[j - 1] * P
        P = P * (s + 2 * j - 1) * (s + 2 * j) / (N * N)
    return out


def zeta_eval(point, n_terms: int | None = None, n_corrections: int | None = None,
              tol: float | None = None):
    """zeta(point) and a bound on the Euler-Maclaurin remainder.

    Defaults: n_terms = max(50, ceil(2 |Im|)), n_corrections = 8.
    """
    s = complex(point)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.real <= 0:
        raise ValueError("real part must be positive")
    N = n_terms if n_terms is not None else max(50, math.ceil(2 * abs(s.imag)))
    m = n_corrections if n_corrections is not None else 8
    m = max(1, m)
    head = complex(_kernels.power_sum(s.real, s.imag, N - 1))
    value = head + complex(_corrections(s, N, m))
    err = _tail_bound(s, N, m) + 4 * N * EPS * max(1.0, abs(value))
    if tol is not None and err > tol:
        raise AccuracyError(f"error estimate {err:.3g} above tolerance {tol:.3g}",
                            best=value, error=err)
    return value, err


def _zeta_fast(s: complex, tol: float):
    N, m = em_parameters(s, tol)
    return zeta_eval(s, N, m)


def _continue_log(sigma: float, t: float, tol: float, floor: float):
    """Horizontal continuation from RIGHT_EDGE to sigma. Returns (log, zeta, err)."""
    x = RIGHT_EDGE
    z, err = _zeta_fast(complex(x, t), tol)
    if sigma >= RIGHT_EDGE:
        z, err = _zeta_fast(complex(sigma, t), tol)
        return complex(np.log(z)), z, err
    arg = math.atan2(z.imag, z.real)
    h = 0.1
    while x > sigma:
        x_new = max(sigma, x - h)
        z_new, err = _zeta_fast(complex(x_new, t), tol)
        mod = abs(z_new)
        if mod < floor:
            raise ZeroOnPathError(f"|zeta| = {mod:.3g} below floor at {complex(x_new, t)}",
                                  point=complex(x_new, t), modulus=mod)
        step = np.angle(z_new / z)
        if abs(step) >= math.pi / 2:
            h /= 2
            if h < 1e-9:
                raise ZeroOnPathError(f"argument not resolvable near {complex(x_new, t)}",
                                      point=complex(x_new, t), modulus=mod)
            continue
        arg += step
        x, z = x_new, z_new
        if abs(step) < math.pi / 8:
            h = min(0.1, 2 * h)
    return complex(math.log(abs(z)), arg), z, err


def log_zeta(point, tolerance: float = 1e-10, floor: float | None = None) -> LogZetaValue:
    """Continuous log zeta at ``point`` (imaginary part > 0)."""
    s = complex(point)
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if floor is None:
        floor = 1e4 * tolerance
    value, z, err = _continue_log(s.real, s.imag, tolerance, floor)
    winding = round((value.imag - math.atan2(z.imag, z.real)) / (2 * math.pi))
    quality = err / abs(z) + 64 * EPS * (1 + abs(value))
    return LogZetaValue(value, int(winding), float(quality))


# --- grids -------------------------------------------------------------------

def _zeta_on_line(sigma: float, t0: float, dt: float, j0: int, count: int, tol: float):
    """zeta(sigma + i(t0 + j dt)) for j = j0 .. j0+count-1, one EM parameter set."""
    t_hi = max(abs(t0 + j0 * dt), abs(t0 + (j0 + count - 1) * dt))
    N, m = em_parameters(complex(sigma, t_hi), tol)
    n = np.arange(1, N, dtype=np.float64)
    logn = np.log(n)
    coef = np.exp(-sigma * logn).astype(np.complex128)
    head = _kernels.dirichlet_grid(logn, coef, t0, dt, j0, count)
    s = sigma + 1j * (t0 + dt * np.arange(j0, j0 + count))
    return head + _corrections(s, N, m)


def zeta_grid(sigma: float, t0: float, dt: float, count: int, tol: float = 1e-10,
              block: int = BLOCK) -> np.ndarray:
    """zeta along a vertical arithmetic grid, evaluated block by block."""
    out = np.empty(count, dtype=np.complex128)
    for j0 in range(0, count, block):
        c = min(block, count - j0)
        out[j0:j0 + c] = _zeta_on_line(sigma, t0, dt, j0, c, tol)
    return out


def _anchor(cache, sigma, t0, dt, j, tol, floor):
    if j not in cache:
        try:
            cache[j] = _continue_log(sigma, t0 + j * dt, tol, floor)[0]
        except ZeroOnPathError:
            cache[j] = None
    return cache[j]


def _log_block(sigma, t0, dt, j0, count, tol, floor, cache=None):
    """log zeta for one block; NaN where |zeta| < floor or continuation fails."""
    cache = {} if cache is None else cache
    z = _zeta_on_line(sigma, t0, dt, j0, count + 1, tol)
    mod = np.abs(z)
    start = _anchor(cache, sigma, t0, dt, j0, tol, floor)
    end = _anchor(cache, sigma, t0, dt, j0 + count, tol, floor)
    ok = start is not None and end is not None
    steps = np.angle(z[1:] / z[:-1]) if ok else None
    if ok and (mod.min() < floor or np.abs(steps).max(initial=0) >= math.pi / 2):
        ok = False
    if ok:
        arg = start.imag + np.concatenate(([0.0], np.cumsum(steps)))
        if abs(arg[-1] - end.imag) > 1.0:
            ok = False
    if ok:
        return np.log(mod[:-1]) + 1j * arg[:-1], mod[:-1]
    # pointwise fallback
    vals = np.full(count, np.nan + 1j * np.nan)
    for j in range(count):
        if mod[j] < floor:
            continue
        try:
            vals[j] = _continue_log(sigma, t0 + (j0 + j) * dt, tol, floor)[0]
        except ZeroOnPathError:
            pass
    return vals, mod[:-1]


def log_zeta_grid(sigma: float, t0: float, dt: float, count: int, tol: float = 1e-10,
                  floor: float = 1e-6, block: int = BLOCK, blocks=None):
    """Continuous log zeta along sigma + i(t0 + j dt).

    Returns (values, modulus).  Entries whose block was skipped (``blocks``
    given and not listing it) or that lie at |zeta| < floor are NaN.
    """
    vals = np.full(count, np.nan + 1j * np.nan)
    mod = np.full(count, np.nan)
    nblocks = -(-count // block)
    todo = range(nblocks) if blocks is None else blocks
    cache = {}
    for b in todo:
        j0 = b * block
        c = min(block, count - j0)
        vals[j0:j0 + c], mod[j0:j0 + c] = _log_block(sigma, t0, dt, j0, c, tol, floor, cache)
    return vals, mod


def _merge(windows):
    out = []
    for a, b in sorted(windows):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def flagged_windows(tau: np.ndarray, flags: np.ndarray, lo: float, hi: float, dtau: float):
    """Cells of half-width dtau/2 around flagged grid points, clipped and merged."""
    if not flags.any():
        return []
    idx = np.flatnonzero(flags)
    # contiguous runs
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate(([idx[0]], idx[breaks + 1]))
    ends = np.concatenate((idx[breaks], [idx[-1]]))
    return _merge([(max(lo, tau[a] - dtau / 2), min(hi, tau[b] + dtau / 2))
                   for a, b in zip(starts, ends)])


def zero_proximity_scan(s, shifts: ShiftVector, tau_range, grid_step: float,
                        floor: float, tol: float = 1e-10) -> ZeroProximityReport:
    """Windows of tau where min_k |zeta(s + i d_k tau)| < floor."""
    if grid_step <= 0 or floor <= 0:
        raise ValueError("grid_step and floor must be positive")
    s = EvalPoint.from_complex(s)
    lo, hi = map(float, tau_range)
    report = ZeroProximityReport(float(floor))
    if hi <= lo:
        return report
    grid = TauGrid.spanning(lo, hi, grid_step)
    tau = grid.points()
    low = np.zeros(grid.count, dtype=bool)
    for d in shifts:
        z = zeta_grid(s.sigma, s.t + d * grid.tau0, d * grid.dtau, grid.count, tol)
        low |= np.abs(z) < floor
    report.tau_windows = flagged_windows(tau, low, lo, hi, grid.dtau)
    return report


@lru_cache(maxsize=64)
def _head_terms(sigma: float, N: int):
    logn = np.log(np.arange(1, N, dtype=np.float64))
    return logn, np.exp(-sigma * logn).astype(np.complex128)


def zeta_fast(s, tol: float = 1e-10) -> complex:
    """zeta(s) with EM parameters tuned to ``tol`` (no error estimate)."""
    s = complex(s)
    N, m = em_parameters(complex(s.real, abs(s.imag) + 1.0), tol)
    logn, coef = _head_terms(s.real, N)
    return complex(_kernels.dirichlet_point(logn, coef, s.imag)) + complex(_corrections(s, N, m))


def log_near(s, ref_imag: float, tol: float = 1e-10) -> complex:
    """log zeta(s) on the branch whose imaginary part is nearest ``ref_imag``."""
    z = zeta_fast(s, tol)
    arg = math.atan2(z.imag, z.real)
    arg += 2 * math.pi * round((ref_imag - arg) / (2 * math.pi))
    return complex(math.log(abs(z)), arg)
