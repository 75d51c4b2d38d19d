import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from jointzeta.errors import AccuracyError, PoleError, ZeroOnPathError
from jointzeta.dirichlet import ShiftVector
from jointzeta.primes import sieve_up_to
from jointzeta.zeta import (EvalPoint, em_parameters, log_zeta, log_zeta_grid, zero_proximity_scan,
                            zeta_eval, zeta_grid)

mpmath.mp.dps = 30


def mp_zeta(s):
    return complex(mpmath.zeta(mpmath.mpc(s.real, s.imag)))


def mp_log_zeta(s):
    """log zeta by integrating zeta'/zeta from 3 + it to s (continuous branch)."""
    a = mpmath.mpc(3, s.imag)
    b = mpmath.mpc(s.real, s.imag)
    start = mpmath.log(mpmath.zeta(a))
    f = lambda z: mpmath.zeta(z, derivative=1) / mpmath.zeta(z)
    return complex(start + mpmath.quad(f, [a, b]))


def test_closed_forms():
    v, err = zeta_eval(2)
    assert abs(v - math.pi ** 2 / 6) < 1e-10 and err < 1e-10
    v, _ = zeta_eval(4)
    assert abs(v - math.pi ** 4 / 90) < 1e-10


def test_against_oversampled_and_mpmath():
    s = 0.75 + 2j
    v, err = zeta_eval(s)
    ref, _ = zeta_eval(s, n_terms=500, n_corrections=80)
    assert abs(v - ref) < 1e-9
    assert abs(v - mp_zeta(s)) < 1e-9


@pytest.mark.parametrize("s", [0.6 + 10j, 0.9 + 123.4j, 0.55 + 1000j, 1.0 + 5000.5j, 0.8 + 30000j])
def test_mpmath_oracle(s):
    v, err = zeta_eval(s)
    ref = mp_zeta(s)
    assert abs(v - ref) <= max(err, 1e-12) * 10
    assert abs(v - ref) < 1e-8 * max(1, abs(ref))


def test_error_estimate_bounds_actual_error():
    s = 0.7 + 40j
    ref = mp_zeta(s)
    for N, m in [(30, 2), (50, 4), (80, 8)]:
        v, err = zeta_eval(s, N, m)
        assert abs(v - ref) <= err


def test_errors():
    with pytest.raises(PoleError):
        zeta_eval(1)
    with pytest.raises(AccuracyError) as exc:
        zeta_eval(0.7 + 40j, 20, 1, tol=1e-12)
    assert exc.value.best is not None and exc.value.error > 1e-12
    with pytest.raises(ValueError):
        EvalPoint(0.5, 1.0)
    with pytest.raises(ValueError):
        EvalPoint(0.75, 0.0)


def test_em_parameters_meet_tolerance():
    for s in (0.6 + 5j, 0.75 + 2000j, 1.0 + 40000j):
        N, m = em_parameters(s, 1e-12)
        v, err = zeta_eval(s, N, m)
        assert err < 1e-10
        assert abs(v - mp_zeta(s)) < 1e-9


def test_log_near_real_axis():
    r = log_zeta(2 + 0.0001j)
    assert abs(r.value - cmath.log(zeta_eval(2 + 0.0001j)[0])) < 1e-9
    assert abs(r.value.real - math.log(math.pi ** 2 / 6)) < 1e-6
    assert r.winding == 0


@pytest.mark.parametrize("s", [0.75 + 2j, 0.6 + 30j, 0.55 + 103.7j, 0.8 + 421.3j])
def test_log_branch_against_contour_integral(s):
    r = log_zeta(s)
    assert abs(r.value - mp_log_zeta(s)) < 1e-8
    assert abs(cmath.exp(r.value) - zeta_eval(s)[0]) <= 10 * r.quality * abs(cmath.exp(r.value))


def test_log_near_first_zero():
    # the first zero ordinate, located by bisection on |zeta| along the half line
    f = lambda t: abs(zeta_eval(0.5 + 1j * t)[0])
    lo, hi = 14.0, 14.3
    for _ in range(60):
        a, b = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        lo, hi = (lo, b) if f(a) < f(b) else (a, hi)
    assert abs(lo - 14.134725) < 1e-5
    try:
        r = log_zeta(0.5 + 14.1347j)
    except ZeroOnPathError:
        return
    assert r.value.real < -8


def test_zero_on_path_is_reported():
    with pytest.raises(ZeroOnPathError):
        log_zeta(complex(0.4, 14.134725141734693), floor=1e-3)


@given(st.floats(0.55, 1.0), st.floats(1.0, 300.0))
def test_conjugation_symmetry(sigma, t):
    a, ea = zeta_eval(complex(sigma, t))
    b, eb = zeta_eval(complex(sigma, -t))
    assert abs(a - b.conjugate()) <= 2 * (ea + eb) + 1e-14


@pytest.mark.parametrize("s", [1.1 + 3j, 1.5 + 20j, 2.0 + 0.5j])
def test_euler_product(s):
    ps = sieve_up_to(10 ** 5).primes.astype(float)
    prod = np.prod(1 / (1 - ps ** (-s)))
    sigma = s.real
    # sum over p > 1e5 of p^-sigma, bounded by the integer tail
    n = np.arange(10 ** 5, 10 ** 6, dtype=float)
    tail = np.sum(n ** -sigma) + (10 ** 6) ** (1 - sigma) / (sigma - 1)
    assert abs(zeta_eval(s)[0] - prod) <= 2 * abs(prod) * tail


def test_grid_matches_pointwise():
    sigma, t0, dt, n = 0.7, 1000.0, 0.013, 3000
    g = zeta_grid(sigma, t0, dt, n)
    for j in (0, 1, 1023, 1024, 2047, 2999):
        assert abs(g[j] - mp_zeta(complex(sigma, t0 + j * dt))) < 1e-9


def test_log_grid_is_continuous_and_matches_pointwise():
    sigma, t0, dt, n = 0.75, 100.0, 1e-3, 5000
    vals, mod = log_zeta_grid(sigma, t0, dt, n)
    assert np.all(mod > 0.1)
    assert np.all(np.isfinite(vals))
    assert np.max(np.abs(np.diff(vals))) < 0.5
    for j in (0, 2500, 4999):
        assert abs(vals[j] - log_zeta(complex(sigma, t0 + j * dt)).value) < 1e-8


def test_zero_proximity():
    rep = zero_proximity_scan(0.9 + 2j, ShiftVector.of(1, 2), (100, 200), 0.01, 1e-6)
    assert rep.tau_windows == []
    assert zero_proximity_scan(0.9 + 2j, ShiftVector.of(1), (100, 100), 0.01, 1e-6).tau_windows == []
    whole = zero_proximity_scan(0.9 + 2j, ShiftVector.of(1), (100, 110), 0.01, 1e9)
    assert whole.tau_windows == [(100.0, 110.0)]
    # near the first zero at height 14.1347 on sigma = 0.55 the modulus dips
    near = zero_proximity_scan(0.55 + 1j, ShiftVector.of(1), (10, 20), 0.01, 0.05)
    assert len(near.tau_windows) == 1
    lo, hi = near.tau_windows[0]
    assert lo < 13.1347 < hi
