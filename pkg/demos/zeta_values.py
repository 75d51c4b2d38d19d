"""Evaluating zeta and following the branch of log zeta up the critical strip.

Run with ``python demos/zeta_values.py``.
"""
# %%
import cmath
import math

from jointzeta import log_zeta, zeta_eval
from jointzeta.zeta import em_parameters

# %% Closed forms at the even integers, with the Euler-Maclaurin error estimate.
for k, exact in [(2, math.pi ** 2 / 6), (4, math.pi ** 4 / 90)]:
    value, err = zeta_eval(k)
    print(f"zeta({k}) = {value.real:.15f}  |err| = {abs(value - exact):.1e}  estimate {err:.1e}")

# %% How many terms and corrections are needed as t grows.
for t in (10, 100, 1000, 10000):
    N, m = em_parameters(complex(0.75, t))
    print(f"t = {t:>6}: N = {N:>5}, m = {m}")

# %% log zeta is continued horizontally from Re s = 3.  ``winding`` counts how many
# multiples of 2 pi i separate it from the principal log; at these heights
# arg zeta rarely leaves (-pi, pi], even right beside a zero.
for t in (14.0, 14.2, 21.0, 100.0):
    s = complex(0.6, t)
    L = log_zeta(s)
    principal = cmath.log(zeta_eval(s)[0])
    print(f"s = {s}: log zeta = {L.value:.6f}  principal = {principal:.6f}  winding = {L.winding}")
