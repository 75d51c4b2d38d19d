import cmath
import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from jointzeta.dirichlet import ShiftVector
from jointzeta.errors import NonConvergenceError, RangeError
from jointzeta.targeting import (PhaseAssignment, TargetSpec, build_phase_assignment,
                                 divergence_witness, exp_poly_zero_count, first_nonvanishing,
                                 lattice_size, residual, wilder_count, wilder_strip)

from conftest import trial_division_primes


def mp_residual(a: PhaseAssignment, spec: TargetSpec) -> float:
    """Residual in 30-digit arithmetic."""
    mpmath.mp.dps = 30
    s = mpmath.mpc(spec.s.real, spec.s.imag)
    worst = 0
    for d, z in zip(spec.shifts, spec.targets):
        total = mpmath.mpc(0)
        for p in a.support:
            total += mpmath.expjpi(2 * mpmath.mpf(d) * mpmath.mpf(a.phases[p])) * mpmath.power(p, -s)
        worst = max(worst, abs(total - mpmath.mpc(z.real, z.imag)))
    return float(worst)


def test_single_term_exact_hit():
    s = 0.75
    spec = TargetSpec([2 ** -s], 1e-6, s, ShiftVector.of(1), prime_floor=1.5)
    a = build_phase_assignment(spec)
    assert a.support == (2,) and a.phases[2] == 0.0
    assert residual(a, spec) < 1e-15


def test_residual_examples():
    spec = TargetSpec([0, 0], 0.1, 0.75 + 2j, ShiftVector.of(1, 2))
    assert residual(PhaseAssignment(), spec) == 0
    s = 0.75 + 2j
    spec = TargetSpec([2 ** -s], 0.1, s, ShiftVector.of(1))
    assert residual(PhaseAssignment((2,), {2: 0.0}), spec) < 1e-15


def test_cancelling_mandatory_primes():
    spec = TargetSpec([0, 0], 0.05, 0.75 + 2j, ShiftVector.of(1, 2), prime_floor=10)
    for mode in ("free", "lattice"):
        a = build_phase_assignment(spec, mode)
        assert {2, 3, 5, 7} <= set(a.support)
        assert mp_residual(a, spec) < 0.05


@pytest.mark.parametrize("mode", ["free", "lattice"])
def test_two_shift_targets(mode):
    spec = TargetSpec([1 + 1j, -1], 0.1, 0.75 + 2j, ShiftVector.of(1, 2))
    a = build_phase_assignment(spec, mode)
    r = mp_residual(a, spec)
    assert r < 0.1
    assert abs(r - residual(a, spec)) < 1e-12
    if mode == "lattice":
        L = lattice_size(spec.shifts)
        assert a.lattice_L == L > spec.shifts.spread
        for th in a.phases.values():
            assert abs(th * L - round(th * L)) < 1e-12


def test_lattice_phases_of_mandatory_primes():
    spec = TargetSpec([0.3, 0.1j], 0.05, 0.8 + 1j, ShiftVector.of(1, 3), prime_floor=12)
    a = build_phase_assignment(spec, "lattice")
    L = a.lattice_L
    for m, p in enumerate((2, 3, 5, 7, 11), start=1):
        assert a.phases[p] == (m % L) / L


def test_non_convergence_carries_best():
    spec = TargetSpec([5 + 5j, -3], 0.01, 0.75 + 2j, ShiftVector.of(1, 2), prime_floor=10)
    with pytest.raises(NonConvergenceError) as exc:
        build_phase_assignment(spec, budget=4)  # pi(10) = 4: no free terms
    assert exc.value.best is not None and exc.value.residual >= 0.01


def test_json_round_trip():
    a = PhaseAssignment((2, 3, 7), {2: 0.25, 3: 0.0, 7: 0.9}, 4)
    doc = json.loads(a.to_json())
    assert doc == {"L": 4, "terms": [{"p": 2, "theta": 0.25}, {"p": 3, "theta": 0.0},
                                     {"p": 7, "theta": 0.9}]}
    assert PhaseAssignment.from_json(a.to_json()) == a


targets = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


@given(st.lists(targets, min_size=2, max_size=2), st.sampled_from(["free", "lattice"]),
       st.floats(0.6, 1.0), st.floats(0.5, 5))
def test_greedy_trace_is_monotone(z, mode, sigma, t):
    spec = TargetSpec(z, 0.2, complex(sigma, t), ShiftVector.of(1, 2))
    try:
        a = build_phase_assignment(spec, mode, budget=3000)
    except NonConvergenceError as exc:
        a = exc.best
    assert all(b <= x + 1e-12 for x, b in zip(a.trace, a.trace[1:]))
    if a.trace and a.trace[-1] < 0.2:
        assert residual(a, spec) < 0.2


# --- zero counting ------------------------------------------------------------

def test_small_exp_poly_cases():
    assert exp_poly_zero_count([1], ShiftVector.of(1)) == 0
    assert exp_poly_zero_count([1, -1], ShiftVector.of(1, 2)) == 1
    assert exp_poly_zero_count([1, 1], ShiftVector.of(1, 2)) == 1
    # (1 + e(x))^2 and (1 + e(x))^3: a double and a triple zero at x = 1/2
    assert exp_poly_zero_count([1, 2, 1], ShiftVector.of(1, 2, 3)) == 2
    assert exp_poly_zero_count([1, 3, 3, 1], ShiftVector.of(1, 2, 3, 4)) == 3


def test_wilder_against_closed_form():
    # zeros of e^z - 1 are 2 pi i k
    assert wilder_count([-1, 1], [0, 1], (1, 1, 6)) == 1
    assert wilder_count([-1, 1], [0, 1], (1, 0.1, 6)) == 0
    assert wilder_count([-1, 1], [0, 1], (1, -1, 14)) == 3
    assert wilder_count([3 + 1j], [2.0], (5, 0, 100)) == 0


def _poly_instance(rng, on_circle, off_circle):
    xs = np.sort(rng.uniform(0.02, 0.98, on_circle))
    if on_circle > 1:
        while np.min(np.diff(xs)) < 0.02:
            xs = np.sort(rng.uniform(0.02, 0.98, on_circle))
    radii = np.where(rng.random(off_circle) < 0.5, rng.uniform(0.3, 0.8, off_circle),
                     rng.uniform(1.25, 3.0, off_circle))
    roots = np.concatenate([np.exp(2j * np.pi * xs),
                            radii * np.exp(2j * np.pi * rng.random(off_circle))])
    coef = np.poly(roots)[::-1]     # coefficient of w^k at index k
    return np.conj(coef), xs


def test_counts_match_polynomial_roots():
    rng = np.random.default_rng(3)
    for _ in range(60):
        r = int(rng.integers(0, 3))
        q = int(rng.integers(0, 3 - r + 1))
        if r + q == 0:
            q = 1
        a, xs = _poly_instance(rng, r, q)
        shifts = ShiftVector.of(*range(1, len(a) + 1))
        got = exp_poly_zero_count(a, shifts)
        assert got == r
        assert got <= shifts.n - 1 + shifts.spread


@given(st.lists(st.complex_numbers(min_magnitude=0.1, max_magnitude=3), min_size=2, max_size=4),
       st.data())
def test_zero_bound_and_refinement_invariance(a, data):
    n = len(a)
    shifts = sorted(data.draw(st.sets(st.integers(1, 6), min_size=n, max_size=n)))
    sv = ShiftVector.of(*shifts)
    c1 = exp_poly_zero_count(a, sv)
    assert c1 <= n - 1 + sv.spread
    assert exp_poly_zero_count(a, sv, resolution=2) == c1


@given(st.lists(st.complex_numbers(min_magnitude=0.2, max_magnitude=3), min_size=2, max_size=3),
       st.floats(0, 5), st.floats(1, 20))
def test_wilder_strip_bound(A, alpha, beta):
    w = list(range(len(A)))
    K = wilder_strip(A, w)
    N = wilder_count(A, w, (K, alpha, beta))
    assert abs(N - beta * (w[-1] - w[0]) / (2 * math.pi)) <= len(A) - 1
    assert wilder_count(A, w, (K, alpha, beta), resolution=2) == N


# --- divergence witness ---------------------------------------------------------

def _oracle_windows(sigma, t, phi, m_max):
    ps = trial_division_primes(int(math.exp((2 * math.pi * m_max + math.pi / 4 + phi) / t)) + 2)
    out = []
    for m in range(1, m_max + 1):
        lo = (2 * math.pi * m - math.pi / 4 + phi) / t
        hi = (2 * math.pi * m + math.pi / 4 + phi) / t
        out.append(math.fsum(p ** -sigma for p in ps if lo < math.log(p) < hi))
    return out


@pytest.mark.parametrize("t", [2.0, 4.0])
def test_divergence_windows_match_oracle(t):
    spec = TargetSpec([1, 1j], 0.1, complex(0.75, t), ShiftVector.of(1, 2))
    direction = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)
    sums = divergence_witness(spec, direction, 2)
    _, c0 = first_nonvanishing(direction, spec.shifts)
    oracle = _oracle_windows(0.75, t, cmath.phase(c0), 2)
    for w, ref in zip(sums, oracle):
        assert w.total == pytest.approx(ref, rel=1e-12, abs=1e-15)
        assert w.scaled == pytest.approx(w.m * ref, rel=1e-12, abs=1e-15)
        assert w.log_hi - w.log_lo == pytest.approx(math.pi / (2 * t))
    assert any(w.total > 0 for w in sums)


def test_divergence_window_below_two_is_empty():
    spec = TargetSpec([1], 0.1, complex(0.75, 40.0), ShiftVector.of(1))
    sums = divergence_witness(spec, [1.0, 0.0], 3)
    assert sums[0].log_hi < math.log(2) and sums[0].total == 0


def test_divergence_range_error():
    spec = TargetSpec([1], 0.1, complex(0.75, 0.5), ShiftVector.of(1))
    with pytest.raises(RangeError):
        divergence_witness(spec, [1.0, 0.0], 10)
