"""Truncated prime Dirichlet sums and their batch evaluation over tau grids."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from . import _kernels
from .errors import RangeError, ResolutionError
from .primes import PrimeTable, table_for


@dataclass(frozen=True)
class ShiftVector:
    """Strictly increasing positive shifts d_1 < ... < d_n."""

    shifts: tuple

    def __post_init__(self):
        d = tuple(float(x) for x in self.shifts)
        if not d:
            raise ValueError("need at least one shift")
        if any(x <= 0 for x in d):
            raise ValueError(f"shifts must be positive: {d}")
        if any(b <= a for a, b in zip(d, d[1:])):
            raise ValueError(f"shifts must be strictly increasing: {d}")
        object.__setattr__(self, "shifts", d)

    @classmethod
    def of(cls, *d) -> "ShiftVector":
        if len(d) == 1 and isinstance(d[0], Iterable):
            d = tuple(d[0])
        return cls(tuple(d))

    @property
    def integral(self) -> bool:
        return all(float(x).is_integer() for x in self.shifts)

    @property
    def n(self) -> int:
        return len(self.shifts)

    @property
    def spread(self) -> float:
        """n - 1 + d_n - d_1, the zero bound of sum_k a_k e(d_k x) on [0, 1]."""
        return self.n - 1 + self.shifts[-1] - self.shifts[0]

    def __len__(self):
        return len(self.shifts)

    def __iter__(self):
        return iter(self.shifts)

    def __getitem__(self, k):
        return self.shifts[k]


@dataclass(frozen=True)
class PrimeSumSpec:
    """Primes p <= cutoff, minus an excluded finite set."""

    cutoff: float
    exclude: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        object.__setattr__(self, "exclude", frozenset(int(p) for p in self.exclude))

    def primes(self, table: PrimeTable | None = None) -> np.ndarray:
        if table is None:
            table = table_for(self.cutoff)
        elif self.cutoff > table.limit:
            raise RangeError(f"cutoff {self.cutoff} beyond sieve limit {table.limit}")
        ps = table.upto(self.cutoff)
        if self.exclude:
            ps = ps[~np.isin(ps, np.fromiter(self.exclude, dtype=np.int64))]
        return ps


class TauGrid(NamedTuple):
    """tau_j = tau0 + j * dtau for j = 0 .. count-1."""

    tau0: float
    dtau: float
    count: int

    @classmethod
    def spanning(cls, lo: float, hi: float, step: float) -> "TauGrid":
        """Grid with both endpoints, step shrunk to divide hi - lo evenly."""
        if step <= 0:
            raise ValueError("grid step must be positive")
        if hi <= lo:
            return cls(float(lo), float(step), 1)
        cells = max(1, math.ceil((hi - lo) / step - 1e-12))
        return cls(float(lo), (hi - lo) / cells, cells + 1)

    def points(self) -> np.ndarray:
        return self.tau0 + self.dtau * np.arange(self.count)


def _terms(s: complex, ps: np.ndarray):
    logp = np.log(ps.astype(np.float64))
    coef = np.exp(-complex(s) * logp)
    return logp, coef


def prime_sum(s: complex, spec: PrimeSumSpec, shift: float, tau: float,
              table: PrimeTable | None = None) -> complex:
    """sum over p <= X, p not excluded, of p^-(s + i*shift*tau)."""
    ps = spec.primes(table)
    if ps.size == 0:
        return 0j
    logp, coef = _terms(s, ps)
    return complex(_kernels.dirichlet_point(logp, coef, float(shift) * float(tau)))


def multi_eval(s: complex, shifts: ShiftVector, spec: PrimeSumSpec, tau_grid,
               table: PrimeTable | None = None, j0: int = 0,
               count_override: int | None = None) -> np.ndarray:
    """Matrix [n x count] of prime_sum(s, spec, d_k, tau_j).

    With ``j0``/``count_override`` only grid indices j0 .. j0+count-1 are
    evaluated; the phase recurrence is anchored on the global index, so a
    sub-range matches the corresponding columns of the full grid bit for bit.
    """
    tau0, dtau, count = tau_grid
    n = count - j0 if count_override is None else count_override
    if n < 1:
        raise ValueError("grid needs at least one point")
    out = np.zeros((len(shifts), n), dtype=np.complex128)
    ps = spec.primes(table)
    if ps.size == 0:
        return out
    logp, coef = _terms(s, ps)
    for k, d in enumerate(shifts):
        out[k] = _kernels.dirichlet_grid(logp, coef, d * tau0, d * dtau, j0, n)
    return out


def mv_meanvalue_check(coefficients: Mapping[int, complex], T: float, grid_step: float):
    """Midpoint-rule (1/T) int_T^2T |sum_p a_p p^-i tau|^2 against sum |a_p|^2."""
    items = [(int(p), complex(a)) for p, a in coefficients.items() if a != 0]
    if not items:
        return 0.0, 0.0
    ps = np.array([p for p, _ in items], dtype=np.int64)
    a = np.array([c for _, c in items])
    logp = np.log(ps.astype(np.float64))
    if grid_step * logp.max() > 0.1:
        raise ResolutionError(
            f"grid step {grid_step} too coarse for log p = {logp.max():.3f}")
    cells = max(1, math.ceil(T / grid_step))
    dtau = T / cells
    vals = _kernels.dirichlet_grid(logp, a, T + 0.5 * dtau, dtau, 0, cells)
    lhs = float(np.mean(vals.real ** 2 + vals.imag ** 2))
    rhs = float(np.sum(np.abs(a) ** 2))
    return lhs, rhs
