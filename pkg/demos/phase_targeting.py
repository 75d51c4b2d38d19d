"""Steering finite prime sums onto several targets at once.

For each shift d_k we want sum_p e(d_k theta_p) p^{-s} close to z_k.
"""
# %%
from jointzeta import ShiftVector, TargetSpec, build_phase_assignment
from jointzeta.targeting import residual

spec = TargetSpec([1 + 1j, -1], 0.1, 0.75 + 2j, ShiftVector.of(1, 2))

# %% Free phases converge fast; lattice phases m/L need a longer tail.
for mode in ("free", "lattice"):
    a = build_phase_assignment(spec, mode)
    print(f"{mode:>7}: {len(a.support)} primes, residual {residual(a, spec):.4f}")
    print("         sums:", [f"{z:.3f}" for z in a.sums(spec.s, spec.shifts)])

# %% The residual trace never increases.
a = build_phase_assignment(spec)
print("trace:", [f"{r:.3f}" for r in a.trace[:10]])
print(a.to_json())
