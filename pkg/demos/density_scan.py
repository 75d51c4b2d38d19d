"""How often do log zeta(s + i d_k tau) sit near prescribed targets for tau in [T, 2T]?"""
# %%
from jointzeta import ScanConfig, find_tau, good_set_measure, log_zeta, theorem_scan, tsang_meansquare

# %% The Dirichlet polynomial approximation improves with sigma and with X.
for sigma in (0.6, 0.75, 0.9):
    print(f"sigma = {sigma}: mean |log zeta - P_X|^2 = {tsang_meansquare(sigma, 1000, 100, 0.05):.4f}")

# %% Most tau are good: log zeta is within epsilon of its prime sum at both shifts.
good = good_set_measure(ScanConfig(0.9 + 2j, (1, 2), 1000, 0.015, epsilon=0.5, cutoff_X=500))
print(f"good-set fraction {good.fraction:.4f}")

# %% Joint targets (0.2 + 0.1i, -0.1) at shifts 1 and 2.
cfg = ScanConfig(0.75 + 2j, (1, 2), 2000, 0.04, epsilon=0.3, cutoff_X=100)
r = theorem_scan(cfg, (0.2 + 0.1j, -0.1))
print(f"hit fraction {r.fraction:.5f} over {len(r.hit_intervals)} intervals")
for tau, dist in find_tau(cfg, (0.2 + 0.1j, -0.1), 3):
    vals = [log_zeta(complex(0.75, 2 + d * tau)).value for d in (1, 2)]
    print(f"tau = {tau:.4f}: distance {dist:.4f}, values {[f'{v:.3f}' for v in vals]}")
