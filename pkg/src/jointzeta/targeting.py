"""Constructive prime-phase targeting and exponential-sum zero counts.

``build_phase_assignment`` picks a finite prime set M and phases theta_p so
that sum_{p in M} e(d_k theta_p) p^-s lands within epsilon of prescribed
targets z_k for every shift d_k at once.  Existence is guaranteed by a
rearrangement argument; here a greedy best-inner-product rule builds the
sum and the output is certified afterwards by ``residual``.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dirichlet import ShiftVector
from .errors import ContourError, NonConvergenceError, RangeError
from .primes import sieve_up_to, table_for

TWO_PI = 2 * math.pi
FREE_GRID = 256
ALIGN_COS = 0.5          # overshooting terms need alignment within 60 degrees
MIN_COS = 0.3            # weakly aligned terms are skipped, not accepted


def e(x):
    return np.exp(2j * np.pi * np.asarray(x))


@dataclass(frozen=True)
class TargetSpec:
    targets: tuple
    epsilon: float
    s: complex
    shifts: ShiftVector
    prime_floor: float = 2.0

    def __post_init__(self):
        z = tuple(complex(x) for x in self.targets)
        if not isinstance(self.shifts, ShiftVector):
            object.__setattr__(self, "shifts", ShiftVector.of(self.shifts))
        if len(z) != len(self.shifts):
            raise ValueError("need one target per shift")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        s = complex(self.s)
        if not 0.5 < s.real <= 1.0 or s.imag < 0:
            raise ValueError(f"s must have real part in (1/2, 1] and imaginary part >= 0: {s}")
        if not self.prime_floor > 0:
            raise ValueError("prime floor y must be positive")
        object.__setattr__(self, "targets", z)
        object.__setattr__(self, "s", s)


@dataclass
class PhaseAssignment:
    support: tuple = ()
    phases: dict = field(default_factory=dict)
    lattice_L: int | None = None
    trace: list = field(default_factory=list, compare=False, repr=False)

    def __len__(self):
        return len(self.support)

    def to_json(self) -> str:
        terms = [{"p": int(p), "theta": float(self.phases[p])} for p in self.support]
        return json.dumps({"L": self.lattice_L, "terms": terms})

    @classmethod
    def from_json(cls, text: str) -> "PhaseAssignment":
        doc = json.loads(text)
        terms = doc["terms"]
        return cls(tuple(int(t["p"]) for t in terms),
                   {int(t["p"]): float(t["theta"]) for t in terms},
                   doc.get("L"))

    def sums(self, s: complex, shifts) -> np.ndarray:
        """sum_{p in M} e(d_k theta_p) p^-s for each shift, by fsum."""
        out = []
        for d in shifts:
            re, im = [], []
            for p in self.support:
                v = cmath.exp(TWO_PI * 1j * d * self.phases[p] - s * math.log(p))
                re.append(v.real)
                im.append(v.imag)
            out.append(complex(math.fsum(re), math.fsum(im)))
        return np.array(out)


def residual(assignment: PhaseAssignment, spec: TargetSpec) -> float:
    """max_k |sum_{p in M} e(d_k theta_p) p^-s - z_k|."""
    sums = assignment.sums(spec.s, spec.shifts)
    return float(np.max(np.abs(sums - np.array(spec.targets))))


def lattice_size(shifts: ShiftVector) -> int:
    """Smallest admissible lattice: L = ceil(n + d_n - d_1) > n - 1 + d_n - d_1."""
    return math.ceil(shifts.spread + 1 - 1e-12)


def _best_phase(cands: np.ndarray, d: np.ndarray, coef: complex, r: np.ndarray):
    """Candidate phase maximising Re <u(theta), r>; first index on ties."""
    U = coef * e(np.outer(cands, d))                  # [candidates x n]
    ip = (U * np.conj(r)[None, :]).real.sum(axis=1)
    i = int(np.argmax(ip))
    return float(cands[i]), U[i], float(ip[i])


def _free_phase(d, coef, r):
    grid = np.arange(FREE_GRID) / FREE_GRID
    th, _, _ = _best_phase(grid, d, coef, r)
    fine = th + (np.arange(FREE_GRID) - FREE_GRID // 2) / (FREE_GRID * FREE_GRID // 2)
    th, u, ip = _best_phase(np.mod(fine, 1.0), d, coef, r)
    return th, u, ip


def build_phase_assignment(spec: TargetSpec, mode: str = "free", budget: int = 10_000,
                           align_cos: float = ALIGN_COS,
                           min_cos: float = MIN_COS) -> PhaseAssignment:
    """Greedy prime-phase assignment with residual < spec.epsilon.

    Primes below the floor y are always included (lattice mode: theta_{p_m}
    = m/L).  Later primes are taken in increasing order; each gets the phase
    whose term best aligns with the remaining gap and is kept only if it
    shrinks the gap (and, when larger than the gap, points within 60 degrees
    of it).  Terms aligned worse than ``min_cos`` are skipped: accepting them
    drags the gap along with the slowly rotating p^-it instead of closing
    it.  Raises NonConvergenceError carrying the best assignment when
    ``budget`` primes are used up.
    """
    if mode not in ("free", "lattice"):
        raise ValueError(f"unknown mode {mode!r}")
    d = np.array(spec.shifts.shifts)
    target = np.array(spec.targets)
    L = lattice_size(spec.shifts) if mode == "lattice" else None
    lattice = np.arange(L) / L if L else None

    table = table_for(max(100, 20 * budget * max(1.0, math.log(budget + 1))))
    primes = table.primes[:budget]
    if len(primes) < budget:
        table = sieve_up_to(int(budget * (math.log(budget + 2) + math.log(math.log(budget + 3)) + 3)))
        primes = table.primes[:budget]

    support, phases = [], {}
    w = np.zeros(len(d), dtype=complex)
    out = PhaseAssignment(lattice_L=L)

    def done():
        return np.max(np.abs(target - w)) < spec.epsilon

    i = 0
    for i, p in enumerate(primes.tolist()):
        if p >= spec.prime_floor:
            break
        coef = complex(cmath.exp(-spec.s * math.log(p)))
        if L:
            th = ((i + 1) % L) / L
            u = coef * e(d * th)
        else:
            th, u, _ = _free_phase(d, coef, target - w)
        support.append(p)
        phases[p] = th
        w = w + u
    else:
        i = len(primes)

    for p in primes[i:].tolist():
        if done():
            break
        r = target - w
        coef = complex(cmath.exp(-spec.s * math.log(p)))
        if L:
            th, u, ip = _best_phase(lattice, d, coef, r)
        else:
            th, u, ip = _free_phase(d, coef, r)
        gap = np.linalg.norm(r)
        size = np.linalg.norm(u)
        if ip < min_cos * size * gap or np.linalg.norm(r - u) >= gap:
            continue
        if size > gap and ip < align_cos * size * gap:
            continue
        support.append(p)
        phases[p] = th
        w = w + u
        out.trace.append(float(np.linalg.norm(target - w)))

    out.support = tuple(support)
    out.phases = phases
    res = residual(out, spec)
    if res >= spec.epsilon:
        raise NonConvergenceError(
            f"residual {res:.4g} >= epsilon {spec.epsilon} after {len(primes)} primes",
            best=out, residual=res)
    return out


# --- zero counting -------------------------------------------------------------

def _g(A, w, z):
    return (A[None, :] * np.exp(np.outer(z, w))).sum(axis=1)


def _dg(A, w, z):
    return ((A * w)[None, :] * np.exp(np.outer(z, w))).sum(axis=1)


def _envelope(A, w, x, power):
    """sum |A_k| |w_k|^power e^{w_k x}: bounds |g^(power)| on the line Re z = x."""
    return (np.abs(A)[None, :] * np.abs(w)[None, :] ** power
            * np.exp(np.outer(x, w))).sum(axis=1)


def _edge_winding(A, w, z0, z1, resolution):
    """Change of arg g along [z0, z1].

    A segment of length h is accepted once, from one of its endpoints,
    h |g'| + D2 h^2 / 2 <= |g| / 2 with D2 bounding |g''| on the segment:
    g then stays within |g|/2 of its endpoint value, so it has no zero on
    the segment and turns by less than pi/6.
    """
    length = abs(z1 - z0)
    npts = max(2, int(math.ceil(resolution * 8 * length * (np.max(np.abs(w)) + 1))) + 1)
    z = z0 + (z1 - z0) * np.linspace(0.0, 1.0, npts)
    g = _g(A, w, z)
    dg = np.abs(_dg(A, w, z))
    for _ in range(200):
        mod = np.abs(g)
        if np.any(mod < 1e-12 * _envelope(A, w, z.real, 0)):
            raise ContourError("contour passes within tolerance of a zero")
        h = np.abs(np.diff(z))
        D2 = np.maximum(_envelope(A, w, z.real[:-1], 2), _envelope(A, w, z.real[1:], 2))
        ok_lo = h * dg[:-1] + 0.5 * D2 * h * h <= 0.5 * mod[:-1]
        ok_hi = h * dg[1:] + 0.5 * D2 * h * h <= 0.5 * mod[1:]
        steps = np.angle(g[1:] / g[:-1])
        bad = np.flatnonzero(~(ok_lo | ok_hi) | (np.abs(steps) >= math.pi / 2))
        if bad.size == 0:
            return float(steps.sum())
        if z.size + bad.size > 5_000_000:
            break
        mid = 0.5 * (z[bad] + z[bad + 1])
        z = np.insert(z, bad + 1, mid)
        g = np.insert(g, bad + 1, _g(A, w, mid))
        dg = np.insert(dg, bad + 1, np.abs(_dg(A, w, mid)))
    raise ContourError("argument tracking did not settle")


def _rectangle_count(A, w, K, alpha, beta, resolution):
    corners = [complex(-K, alpha), complex(K, alpha), complex(K, alpha + beta),
               complex(-K, alpha + beta)]
    total = sum(_edge_winding(A, w, corners[i], corners[(i + 1) % 4], resolution)
                for i in range(4))
    return int(round(total / TWO_PI))


def wilder_count(amplitudes, frequencies, rectangle, resolution: int = 1,
                 nudge: bool = True) -> int:
    """Zeros of g(z) = sum A_k e^{w_k z} in |Re z| <= K, Im z in [alpha, alpha+beta].

    Counted by the argument principle along the rectangle boundary.  If the
    contour comes too close to a zero, K is grown by 10% once.
    """
    A = np.asarray(amplitudes, dtype=complex)
    w = np.asarray(frequencies, dtype=float)
    if np.any(A == 0):
        raise ValueError("amplitudes must be non-zero")
    if np.any(np.diff(w) <= 0):
        raise ValueError("frequencies must be strictly increasing")
    K, alpha, beta = (float(x) for x in rectangle)
    if A.size == 1:
        return 0
    try:
        return _rectangle_count(A, w, K, alpha, beta, resolution)
    except ContourError:
        if not nudge:
            raise
        return _rectangle_count(A, w, 1.1 * K, alpha, beta, resolution)


def wilder_strip(amplitudes, frequencies) -> float:
    """A half-width K such that every zero of sum A_k e^{w_k z} has |Re z| <= K."""
    A = np.abs(np.asarray(amplitudes, dtype=complex))
    w = np.asarray(frequencies, dtype=float)
    if A.size == 1:
        return 1.0
    right = math.log(max(A[:-1].sum() / A[-1], 1.0)) / (w[-1] - w[-2])
    left = math.log(max(A[1:].sum() / A[0], 1.0)) / (w[1] - w[0])
    return max(right, left) + 1.0


_OFFSETS = (1e-4, 3.7e-4, 1.3e-3, 4.1e-3, 1.1e-2)


def exp_poly_zero_count(coeffs, shifts, half_height: float = 1e-3, resolution: int = 1) -> int:
    """Zeros in [0, 1) of f(x) = sum conj(a_k) e(d_k x), with multiplicity.

    Substituting z = 2 pi i x turns f into sum conj(a_k) e^{d_k z}; the count
    is taken over a thin rectangle around the segment, shifted down by a
    small offset so a zero at x = 0 is inside and one at x = 1 is not.
    """
    a = np.asarray(coeffs, dtype=complex)
    d = np.asarray(list(shifts), dtype=float)
    if a.shape != d.shape:
        raise ValueError("one coefficient per shift")
    if np.any(a == 0):
        raise ValueError("coefficients must be non-zero")
    last = None
    for eta in _OFFSETS:
        try:
            return wilder_count(np.conj(a), d, (half_height, -TWO_PI * eta, TWO_PI),
                                resolution, nudge=False)
        except ContourError as exc:
            last = exc
    raise ContourError(f"every contour offset passed near a zero: {last}")


# --- divergence witness ----------------------------------------------------------

class WindowSum(NamedTuple):
    m: int
    log_lo: float
    log_hi: float
    total: float       # sum of p^-sigma over primes with log p in (log_lo, log_hi)
    scaled: float      # m * total, expected to stay away from 0


def first_nonvanishing(direction, shifts: ShiftVector, tol: float = 1e-12):
    """(m0, c0) with c0 = f(m0/L) != 0, f(x) = sum conj(a_k) e(d_k x)."""
    v = np.asarray(direction, dtype=float)
    a = v[0::2] + 1j * v[1::2]
    L = lattice_size(shifts)
    d = np.array(shifts.shifts)
    for m0 in range(L):
        c0 = complex(np.sum(np.conj(a) * e(d * m0 / L)))
        if abs(c0) > tol:
            return m0, c0
    raise ValueError("f vanishes on the whole lattice; direction is zero")


def divergence_witness(spec: TargetSpec, direction, m_max: int,
                       sieve_limit: int = 2 * 10 ** 7) -> list:
    """Window sums sum p^-sigma over log p in (2 pi m/t -+ pi/(4t) + phi/t)."""
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    v = np.asarray(direction, dtype=float)
    if v.size != 2 * len(spec.shifts):
        raise ValueError("direction must live in R^{2n}")
    sigma, t = spec.s.real, spec.s.imag
    if t <= 0:
        raise ValueError("need t > 0")
    _, c0 = first_nonvanishing(v / np.linalg.norm(v), spec.shifts)
    phi = cmath.phase(c0)
    top = (TWO_PI * m_max + math.pi / 4 + phi) / t
    if math.exp(top) > sieve_limit:
        raise RangeError(f"window reaches p ~ {math.exp(top):.3g} beyond sieve limit {sieve_limit}")
    logp = np.log(table_for(math.exp(top) + 1).primes.astype(float))
    out = []
    for m in range(1, m_max + 1):
        lo = (TWO_PI * m - math.pi / 4 + phi) / t
        hi = (TWO_PI * m + math.pi / 4 + phi) / t
        sel = logp[(logp > lo) & (logp < hi)]
        total = math.fsum(np.exp(-sigma * sel).tolist())
        out.append(WindowSum(m, lo, hi, total, m * total))
    return out
