"""Counting zeros of exponential polynomials with the argument principle."""
# %%
import math

from jointzeta import ShiftVector
from jointzeta.targeting import exp_poly_zero_count, wilder_count, wilder_strip

# %% e^z - 1 vanishes at 2 pi i k.
for beta in (6, 13, 20, 100):
    n = wilder_count([-1, 1], [0, 1], (1, 1, beta))
    print(f"zeros with Im z in [1, {1 + beta}]: {n}  expected {math.floor((1 + beta) / (2 * math.pi))}")

# %% Strip width outside which g has no zeros.
print("strip half-width for 1 + 2e^z + e^{3z}:", wilder_strip([1, 2, 1], [0, 1, 3]))

# %% Zeros in [0, 1) of sum conj(a_k) e(d_k x) never exceed n - 1 + d_n - d_1.
for coeffs, shifts in [([1, 2, 1], (1, 2, 3)), ([1, -1], (1, 3)), ([1, 1j, 2], (1, 2, 5))]:
    sv = ShiftVector.of(*shifts)
    print(f"{coeffs} at {shifts}: {exp_poly_zero_count(coeffs, sv)} zeros, bound {sv.n - 1 + sv.spread:g}")
