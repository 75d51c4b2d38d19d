"""Simultaneous Diophantine approximation: the exact minimiser versus Chen's bound."""
# %%
import math

from jointzeta import KroneckerInstance, chen_search, homogeneous_window

# %% The best t <= 100 for sqrt 2 is a continued-fraction denominator.
sol = chen_search(KroneckerInstance.homogeneous([math.sqrt(2)], 3, (1, 100)))
print(f"t* = {sol.t_star}, objective = {sol.objective:.3e}, bound = {sol.bound:.3e}")

# %% Two frequencies over longer windows; the T-dependent part of the bound decays like 1/T.
lams = [math.sqrt(2), math.sqrt(3)]
for T in (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5):
    sol = chen_search(KroneckerInstance.homogeneous(lams, 3, (1, T)))
    print(f"T = {T:>6}: t* = {sol.t_star:>6}, objective = {sol.objective:.2e}, "
          f"bound = {sol.bound:.2e}, Lambda = {sol.Lambda:.4f}")

# %% Corollary form: an integer h with sum ||h d_k||^2 <= n / omega near any start a.
for shifts in ([1.0, 2.0], [0.3, math.pi], [1.5, 2.25, 7.1]):
    h, used = homogeneous_window(shifts, 50, 1000)
    err = sum(abs(h * d - round(h * d)) ** 2 for d in shifts)
    print(f"shifts {shifts}: h = {h} (window {used}), sum = {err:.4f} <= {len(shifts) / 50:.4f}")
