"""Empirical measures of tau-sets over [T, 2T].

Every scan runs on a deterministic grid.  Grid points are evaluated in
chunks aligned to the kernel anchor spacing, so the output does not depend
on the number of workers.  The phase predicate is piecewise linear in tau,
so its windows are solved exactly inside any cell a Lipschitz test cannot
settle.  Boundaries of the log zeta predicates are refined with a bracketed
root search between neighbouring grid points.  Grid points where some zeta
value falls below ``floor`` are cut out of both the hits and the
denominator.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import zeta as Z
from ._kernels import ANCHOR
from .dirichlet import PrimeSumSpec, ShiftVector, TauGrid, multi_eval
from .errors import ResolutionError
from .primes import table_for
from .targeting import PhaseAssignment

CHUNK = 16 * ANCHOR
# the prime-sum prefilter misses hits when its slack is below the typical
# gap between log zeta and the truncated prime sum, so the default slack
# never drops under this
SLACK_FLOOR = 1.0
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class ScanConfig:
    s: Z.EvalPoint
    shifts: ShiftVector
    T: float
    grid_step: float
    epsilon: float = 0.1
    cutoff_X: float = 100.0
    seed: int = 0
    floor: float = 1e-6
    zeta_tol: float = 1e-10
    workers: int = 1

    def __post_init__(self):
        if not isinstance(self.s, Z.EvalPoint):
            object.__setattr__(self, "s", Z.EvalPoint.from_complex(self.s))
        if not isinstance(self.shifts, ShiftVector):
            object.__setattr__(self, "shifts", ShiftVector.of(self.shifts))
        if not self.T > 0:
            raise ValueError("T must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        limit = self.max_grid_step
        if not 0 < self.grid_step <= limit * (1 + 1e-12):
            raise ResolutionError(
                f"grid step {self.grid_step} exceeds {limit:.4g} = pi/(8 d_n max(1, log X))")

    @property
    def max_grid_step(self) -> float:
        return math.pi / (8 * self.shifts[-1] * max(1.0, math.log(max(self.cutoff_X, 1.0))))

    @property
    def delta_equivalent(self) -> float:
        """The exponent delta with X = T^delta."""
        if self.cutoff_X <= 1 or self.T <= 1:
            return 0.0
        return math.log(self.cutoff_X) / math.log(self.T)

    def grid(self) -> TauGrid:
        return TauGrid.spanning(self.T, 2 * self.T, self.grid_step)

    def to_dict(self) -> dict:
        return {"sigma": self.s.sigma, "t": self.s.t, "shifts": list(self.shifts.shifts),
                "T": self.T, "grid_step": self.grid_step, "epsilon": self.epsilon,
                "cutoff_X": self.cutoff_X, "seed": self.seed, "floor": self.floor,
                "zeta_tol": self.zeta_tol}


@dataclass
class DensityReport:
    total_measure: float
    hit_measure: float
    fraction: float
    hit_intervals: list
    excluded_measure: float = 0.0
    excluded_intervals: list = field(default_factory=list)
    cutoff_X: float | None = None
    delta_equivalent: float | None = None
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hit_intervals"] = [list(map(float, iv)) for iv in self.hit_intervals]
        d["excluded_intervals"] = [list(map(float, iv)) for iv in self.excluded_intervals]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DensityReport":
        d = dict(d)
        d["hit_intervals"] = [tuple(iv) for iv in d["hit_intervals"]]
        d["excluded_intervals"] = [tuple(iv) for iv in d.get("excluded_intervals", [])]
        return cls(**d)


@dataclass
class WindowSet:
    d_halfwidth: float
    assignment: PhaseAssignment
    intervals: list

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals))


# --- interval helpers -----------------------------------------------------------

def _runs(inside: np.ndarray):
    """(start, end) index pairs of maximal True runs, inclusive."""
    x = np.concatenate(([0], inside.astype(np.int8), [0]))
    dx = np.diff(x)
    return np.flatnonzero(dx == 1), np.flatnonzero(dx == -1) - 1


def _intervals(grid: TauGrid, inside: np.ndarray, refine):
    """Hit intervals from a boolean grid; refine(out_tau, in_tau) -> boundary taus."""
    starts, ends = _runs(inside)
    if starts.size == 0:
        return []
    tau = lambda j: grid.tau0 + grid.dtau * j
    lo = tau(starts).astype(float)
    hi = tau(ends).astype(float)
    need_lo = starts > 0
    need_hi = ends < grid.count - 1
    if need_lo.any():
        lo[need_lo] = refine(tau(starts[need_lo] - 1), tau(starts[need_lo]))
    if need_hi.any():
        hi[need_hi] = refine(tau(ends[need_hi] + 1), tau(ends[need_hi]))
    return list(zip(lo.tolist(), hi.tolist()))


def _subtract(intervals, holes):
    """Interval list minus the union of ``holes`` (both sorted, disjoint)."""
    if not holes:
        return list(intervals)
    out = []
    for a, b in intervals:
        cur = a
        for c, d in holes:
            if d <= cur or c >= b:
                continue
            if c > cur:
                out.append((cur, c))
            cur = max(cur, d)
            if cur >= b:
                break
        if cur < b:
            out.append((cur, b))
    return out


def _measure(intervals) -> float:
    return float(sum(b - a for a, b in intervals))


def _cumulative(intervals, x: np.ndarray) -> np.ndarray:
    """Measure of (union of intervals) intersected with (-inf, x]."""
    if not intervals:
        return np.zeros_like(x)
    iv = np.asarray(intervals, dtype=float)
    lo, hi = iv[:, 0], iv[:, 1]
    before = np.concatenate(([0.0], np.cumsum(hi - lo)))
    k = np.searchsorted(lo, x, side="right")          # intervals starting <= x
    partial = np.where(k > 0, np.clip(x - lo[np.maximum(k - 1, 0)], 0,
                                      (hi - lo)[np.maximum(k - 1, 0)]), 0.0)
    return before[np.maximum(k - 1, 0)] * (k > 0) + partial


def _xtol(grid: TauGrid) -> float:
    """Boundary tolerance 1e-9 grid steps, but never below float resolution."""
    end = grid.tau0 + grid.dtau * grid.count
    return max(1e-9 * grid.dtau, 8 * np.spacing(abs(end)))


def _chunks(count: int):
    return [(j0, min(CHUNK, count - j0)) for j0 in range(0, count, CHUNK)]


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _bracket_root(f, out_tau: float, in_tau: float, xtol: float, fout=None, fin=None):
    """Root of f between a point with f >= 0 and one with f < 0 (Illinois)."""
    a, b = out_tau, in_tau
    fa = f(a) if fout is None else fout
    fb = f(b) if fin is None else fin
    if not np.isfinite(fa):
        return _bisect(f, a, b, xtol)
    side = 0
    for _ in range(100):
        if abs(b - a) <= xtol:
            break
        c = b - fb * (b - a) / (fb - fa) if fb != fa else 0.5 * (a + b)
        if not min(a, b) < c < max(a, b):
            c = 0.5 * (a + b)
        fc = f(c)
        if not np.isfinite(fc) or fc >= 0:
            a, fa = c, fc if np.isfinite(fc) else fa
            if side == -1:
                fb /= 2
            side = -1
        else:
            b, fb = c, fc
            if side == 1:
                fa /= 2
            side = 1
    return b


def _bisect(f, a, b, xtol):
    for _ in range(200):
        if abs(b - a) <= xtol:
            break
        c = 0.5 * (a + b)
        fc = f(c)
        if np.isfinite(fc) and fc < 0:
            b = c
        else:
            a = c
    return b


# --- A_d(T) ---------------------------------------------------------------------

def _phase_distance(tau: np.ndarray, logp: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """max_p || -tau log p / 2 pi - theta_p ||."""
    if logp.size == 0:
        return np.zeros(np.shape(tau))
    x = -np.multiply.outer(tau, logp) / TWO_PI - theta
    return np.abs(x - np.round(x)).max(axis=-1)


def _cell_pieces(ta, tb, logp, theta, d):
    """Exact sub-intervals of cells [ta, tb] where max_p ||x_p(tau)|| <= d.

    Each x_p(tau) = -tau log p / 2 pi - theta_p is linear, so the predicate
    can only change at tau where x_p hits k -+ d.  Within a cell those
    breakpoints are collected, sorted, and the predicate is evaluated at the
    midpoint of each piece.  Returns (lo, hi) arrays of inside pieces in
    order, with pieces of one cell that touch already merged.
    """
    a = logp / TWO_PI
    xa = -np.multiply.outer(ta, a) - theta            # [cells, primes]
    xb = -np.multiply.outer(tb, a) - theta
    k0 = np.floor(np.minimum(xa, xb) - d)
    # the resolution guard keeps a * h <= 1/4, so three integers cover the range
    pts = [ta[:, None], tb[:, None]]
    for dk in range(4):
        for sgn in (-1.0, 1.0):
            # x = k + sgn d  <=>  tau = -(k + sgn d + theta) / a
            tau = -(k0 + dk + sgn * d + theta) / a
            pts.append(np.clip(tau, ta[:, None], tb[:, None]))
    bp = np.sort(np.concatenate(pts, axis=1), axis=1)
    mid = 0.5 * (bp[:, 1:] + bp[:, :-1])
    inside = _phase_distance(mid, logp, theta) <= d
    inside &= bp[:, 1:] > bp[:, :-1]
    lo, hi = bp[:, :-1][inside], bp[:, 1:][inside]
    if lo.size > 1:
        # merge touching pieces (rows are in order, so the flattened list is sorted)
        new = np.concatenate(([True], lo[1:] != hi[:-1]))
        starts = np.flatnonzero(new)
        ends = np.concatenate((starts[1:] - 1, [lo.size - 1]))
        lo, hi = lo[starts], hi[ends]
    return lo, hi


def scan_A_d(assignment: PhaseAssignment, d: float, config: ScanConfig):
    """A_d(T) = {tau in [T, 2T] : max_p ||-tau log p/2pi - theta_p|| <= d}.

    The predicate is a maximum of Lipschitz functions with constant
    max log p / 2 pi, so a grid cell whose endpoint values are far enough
    from d is entirely inside or outside.  Every other cell is solved
    exactly from its breakpoints, which also catches windows shorter than
    a grid step.  Returns (WindowSet, measure / T).
    """
    if not 0 < d < 0.5:
        raise ValueError("d must lie in (0, 1/2)")
    ps = np.array(assignment.support, dtype=float)
    logp = np.log(ps) if ps.size else np.zeros(0)
    theta = np.array([assignment.phases[p] for p in assignment.support], dtype=float)
    grid = config.grid()
    if logp.size and grid.dtau * logp.max() / TWO_PI > 0.25:
        raise ResolutionError("grid step too coarse for the fastest prime phase")
    if not logp.size:
        ws = WindowSet(float(d), assignment, [(grid.tau0, grid.tau0 + grid.dtau * (grid.count - 1))])
        return ws, ws.measure / config.T
    lip = logp.max() / TWO_PI

    def chunk(arg):
        j0, c = arg
        c = min(c + 1, grid.count - j0)               # cells j0 .. j0+c-2
        tau = grid.tau0 + grid.dtau * np.arange(j0, j0 + c)
        F = _phase_distance(tau, logp, theta)
        ta, tb = tau[:-1], tau[1:]
        h = tb - ta
        mean = 0.5 * (F[:-1] + F[1:])
        full = mean + 0.5 * lip * h <= d
        empty = mean - 0.5 * lip * h > d
        mixed = ~(full | empty)
        lo = [ta[full]]
        hi = [tb[full]]
        order = [np.flatnonzero(full).astype(float)]
        if mixed.any():
            idx = np.flatnonzero(mixed)
            plo, phi = _cell_pieces(ta[idx], tb[idx], logp, theta, d)
            # position of each piece among the cells, for a stable merge
            cell = np.searchsorted(tb[idx], plo, side="right").clip(max=idx.size - 1)
            lo.append(plo)
            hi.append(phi)
            order.append(idx[cell] + 0.5)
        lo, hi, order = np.concatenate(lo), np.concatenate(hi), np.concatenate(order)
        perm = np.lexsort((lo, order))
        lo, hi = lo[perm], hi[perm]
        if lo.size == 0:
            return []
        new = np.concatenate(([True], lo[1:] != hi[:-1]))
        starts = np.flatnonzero(new)
        ends = np.concatenate((starts[1:] - 1, [lo.size - 1]))
        return list(zip(lo[starts].tolist(), hi[ends].tolist()))

    parts = _map(chunk, _chunks(grid.count - 1), config.workers)
    ivs = []
    for part in parts:
        if ivs and part and part[0][0] == ivs[-1][1]:
            ivs[-1] = (ivs[-1][0], part[0][1])
            part = part[1:]
        ivs.extend(part)
    ws = WindowSet(float(d), assignment, ivs)
    return ws, ws.measure / config.T


def tail_energy(assignment: PhaseAssignment, d: float, config: ScanConfig, k: int = 0,
                windows: WindowSet | None = None):
    """(int over A_d(T) of |sum_{p<=X, p not in M} p^-(s+i d_k tau)|^2, T (2d)^|M| y^(1-2 sigma)).

    y is the smallest prime outside M.  Midpoint rule on the scan grid, each
    cell weighted by its overlap with A_d(T).
    """
    if windows is None:
        windows, _ = scan_A_d(assignment, d, config)
    grid = config.grid()
    edges = grid.points()
    weights = np.diff(_cumulative(windows.intervals, edges))
    spec = PrimeSumSpec(config.cutoff_X, frozenset(assignment.support))
    shift = ShiftVector.of(config.shifts[k])
    mids = TauGrid(grid.tau0 + 0.5 * grid.dtau, grid.dtau, grid.count - 1)

    def chunk(arg):
        j0, c = arg
        c = min(c, mids.count - j0)
        if c <= 0:
            return 0.0
        S = multi_eval(config.s.s, shift, spec, mids, j0=j0, count_override=c)[0]
        return float(np.dot(weights[j0:j0 + c], S.real ** 2 + S.imag ** 2))

    integral = math.fsum(_map(chunk, _chunks(mids.count), config.workers))
    support = set(assignment.support)
    y = next(p for p in table_for(max(support, default=2) + 100) if p not in support)
    reference = config.T * (2 * d) ** len(support) * y ** (1 - 2 * config.s.sigma)
    return integral, reference


# --- log zeta scans ---------------------------------------------------------------

def _log_zeta_chunk(sigma, t0, dt, j0, c, tol, floor, blocks=None):
    """log zeta on global grid indices j0 .. j0+c-1 (NaN where skipped or excluded)."""
    vals = np.full(c, np.nan + 1j * np.nan)
    mod = np.full(c, np.nan)
    cache = {}
    for b0 in range(j0, j0 + c, Z.BLOCK):
        if blocks is not None and b0 // Z.BLOCK not in blocks:
            continue
        n = min(Z.BLOCK, j0 + c - b0)
        v, m = Z._log_block(sigma, t0, dt, b0, n, tol, floor, cache)
        vals[b0 - j0:b0 - j0 + n] = v
        mod[b0 - j0:b0 - j0 + n] = m
    return vals, mod


def _log_zeta_all(config: ScanConfig, grid: TauGrid, blocks=None):
    """[n x count] log zeta(s + i d_k tau_j) and a per-point exclusion mask."""
    sig, t = config.s.sigma, config.s.t
    n = len(config.shifts)

    def chunk(arg):
        j0, c = arg
        L = np.empty((n, c), dtype=complex)
        low = np.zeros(c, dtype=bool)
        for k, d in enumerate(config.shifts):
            v, m = _log_zeta_chunk(sig, t + d * grid.tau0, d * grid.dtau, j0, c,
                                   config.zeta_tol, config.floor, blocks)
            L[k] = v
            low |= m < config.floor
            if blocks is None:
                low |= ~np.isfinite(v)
        return L, low

    parts = _map(chunk, _chunks(grid.count), config.workers)
    return np.concatenate([p[0] for p in parts], axis=1), np.concatenate([p[1] for p in parts])


def _dirichlet_all(config: ScanConfig, grid: TauGrid, s=None):
    spec = PrimeSumSpec(config.cutoff_X)
    s = config.s.s if s is None else s

    def chunk(arg):
        j0, c = arg
        return multi_eval(s, config.shifts, spec, grid, j0=j0, count_override=c)

    return np.concatenate(_map(chunk, _chunks(grid.count), config.workers), axis=1)


def _pointwise_logs(config: ScanConfig, tau: float, refs) -> np.ndarray:
    s = config.s
    return np.array([Z.log_near(complex(s.sigma, s.t + d * tau), r, config.zeta_tol)
                     for d, r in zip(config.shifts, refs)])


def _prime_sums_at(config: ScanConfig, tau: float) -> np.ndarray:
    spec = PrimeSumSpec(config.cutoff_X)
    grid = TauGrid(tau, 1.0, 1)
    return multi_eval(config.s.s, config.shifts, spec, grid)[:, 0]


def _density(config: ScanConfig, grid: TauGrid, F: np.ndarray, excluded: np.ndarray,
             threshold: float, pointwise, refs: np.ndarray) -> DensityReport:
    """Report for {F < threshold}, F known on the grid and pointwise via ``pointwise``."""
    inside = (F < threshold) & ~excluded
    xtol = _xtol(grid)

    def refine(out_tau, in_tau):
        out = []
        for a, b in zip(np.atleast_1d(out_tau), np.atleast_1d(in_tau)):
            j = int(round((b - grid.tau0) / grid.dtau))
            ref = refs[:, j]
            g = lambda x: pointwise(x, ref) - threshold
            ja = int(round((a - grid.tau0) / grid.dtau))
            fa = F[ja] - threshold if not excluded[ja] else np.inf
            out.append(_bracket_root(g, a, b, xtol, fout=fa, fin=F[j] - threshold))
        return np.array(out)

    hits = _intervals(grid, inside, refine)
    tau = grid.points()
    lo, hi = config.T, 2 * config.T
    holes = Z.flagged_windows(tau, excluded, lo, hi, grid.dtau)
    hits = _subtract(hits, holes)
    excl = _measure(holes)
    total = config.T - excl
    hit = _measure(hits)
    return DensityReport(total, hit, hit / total if total > 0 else 0.0, hits, excl, holes,
                         config.cutoff_X, config.delta_equivalent)


def good_set_measure(config: ScanConfig) -> DensityReport:
    """Share of [T, 2T] with max_k |log zeta(s+i d_k tau) - sum_{p<=X} p^-(s+i d_k tau)| < eps."""
    grid = config.grid()
    L, excluded = _log_zeta_all(config, grid)
    P = _dirichlet_all(config, grid)
    F = np.abs(L - P).max(axis=0)
    F[~np.isfinite(F)] = np.inf

    def pointwise(tau, ref):
        Lx = _pointwise_logs(config, tau, ref.imag)
        return float(np.abs(Lx - _prime_sums_at(config, tau)).max())

    return _density(config, grid, F, excluded, config.epsilon, pointwise, L)


def tsang_meansquare(sigma: float, T: float, cutoff_X: float, grid_step: float,
                     floor: float = 1e-6, tol: float = 1e-10, workers: int = 1) -> float:
    """(1/T) int_T^2T |log zeta(sigma+i tau) - sum_{p<=X} p^-(sigma+i tau)|^2 d tau.

    Midpoint rule; cells whose midpoint has |zeta| < floor are dropped and
    the mean is taken over the rest.
    """
    if not 0.5 < sigma <= 1:
        raise ValueError("sigma must lie in (1/2, 1]")
    cells = max(1, math.ceil(T / grid_step))
    dtau = T / cells
    mids = TauGrid(T + 0.5 * dtau, dtau, cells)
    spec = PrimeSumSpec(cutoff_X)

    def chunk(arg):
        j0, c = arg
        v, m = _log_zeta_chunk(sigma, mids.tau0, dtau, j0, c, tol, floor)
        P = multi_eval(complex(sigma, 0.0), ShiftVector.of(1), spec, mids, j0=j0,
                       count_override=c)[0]
        ok = np.isfinite(v) & (m >= floor)
        diff = v[ok] - P[ok]
        return math.fsum((diff.real ** 2 + diff.imag ** 2).tolist()), int(ok.sum())

    parts = _map(chunk, _chunks(cells), workers)
    n = sum(p[1] for p in parts)
    return math.fsum(p[0] for p in parts) / n if n else math.nan


def _prefilter_blocks(P: np.ndarray, z: np.ndarray, bound: float):
    near = np.abs(P - z[:, None]).max(axis=0) < bound
    return set((np.flatnonzero(near) // Z.BLOCK).tolist())


def _theorem_grid(config: ScanConfig, targets, prefilter_slack):
    z = np.asarray(targets, dtype=complex)
    if z.shape != (len(config.shifts),):
        raise ValueError("need one target per shift")
    grid = config.grid()
    eps = config.epsilon
    slack = max(2 * eps, SLACK_FLOOR) if prefilter_slack is None else prefilter_slack
    blocks = None
    if math.isfinite(slack):
        blocks = _prefilter_blocks(_dirichlet_all(config, grid), z, eps + slack)
    L, excluded = _log_zeta_all(config, grid, blocks)
    F = np.abs(L - z[:, None]).max(axis=0)
    F[~np.isfinite(F)] = np.inf
    if blocks is not None:
        # points of evaluated blocks that still came back NaN are excluded
        evaluated = np.isin(np.arange(grid.count) // Z.BLOCK, list(blocks))
        excluded |= evaluated & ~np.isfinite(L).all(axis=0)
    return grid, z, L, F, excluded


def theorem_scan(config: ScanConfig, targets, prefilter_slack: float | None = None) -> DensityReport:
    """Share of [T, 2T] with max_k |log zeta(s + i d_k tau) - z_k| < epsilon.

    A cheap prime-sum predicate with slack ``prefilter_slack`` (default
    max(2 epsilon, SLACK_FLOOR); ``math.inf`` disables it) selects the blocks on which log
    zeta is evaluated exactly.
    """
    grid, z, L, F, excluded = _theorem_grid(config, targets, prefilter_slack)

    def pointwise(tau, ref):
        return float(np.abs(_pointwise_logs(config, tau, ref.imag) - z).max())

    report = _density(config, grid, F, excluded, config.epsilon, pointwise, L)
    if not config.shifts.integral:
        report.flags.append("non-integral shifts: the density statement assumes integers")
        warnings.warn("theorem_scan with non-integral shifts", stacklevel=2)
    return report


def find_tau(config: ScanConfig, targets, max_hits: int = 10,
             prefilter_slack: float | None = None) -> list:
    """Up to ``max_hits`` (tau, max_k |log zeta(s+i d_k tau) - z_k|), best first.

    One candidate per hit interval: the best grid point, polished by a
    bounded scalar search and re-verified with ``log_zeta``.
    """
    grid, z, L, F, excluded = _theorem_grid(config, targets, prefilter_slack)
    inside = (F < config.epsilon) & ~excluded
    starts, ends = _runs(inside)
    cands = []
    for a, b in zip(starts, ends):
        j = a + int(np.argmin(F[a:b + 1]))
        cands.append((F[j], j))
    cands.sort()
    out = []
    s = config.s
    for _, j in cands[: max(0, 3 * max_hits)]:
        tau_j = grid.tau0 + grid.dtau * j
        ref = L[:, j].imag
        f = lambda x: float(np.abs(_pointwise_logs(config, x, ref) - z).max())
        lo = max(config.T, tau_j - grid.dtau)
        hi = min(2 * config.T, tau_j + grid.dtau)
        best = tau_j
        if hi > lo:
            res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-9 * grid.dtau})
            if res.fun < F[j]:
                best = float(res.x)
        vals = [Z.log_zeta(complex(s.sigma, s.t + d * best), config.zeta_tol).value
                for d in config.shifts]
        dist = float(np.abs(np.array(vals) - z).max())
        if dist < config.epsilon:
            out.append((best, dist))
    out.sort(key=lambda x: x[1])
    return out[:max_hits]
