"""Prime phases -tau log p / 2 pi fill the torus: meas A_d(T) / T tends to (2d)^|M|."""
# %%
from jointzeta import PhaseAssignment, ScanConfig, scan_A_d, tail_energy

a = PhaseAssignment((2, 3), {2: 0.0, 3: 0.0})
for T in (1e3, 1e4, 1e5, 1e6):
    ws, f = scan_A_d(a, 0.25, ScanConfig(0.75 + 2j, (1,), T, 0.05, cutoff_X=3))
    print(f"T = {T:>9.0f}: fraction {f:.7f}  error {f - 0.25:+.2e}  windows {len(ws.intervals)}")

# %% The prime sum over p not in M, restricted to A_d(T), stays of size T (2d)^|M| y^(1 - 2 sigma).
b = PhaseAssignment((2, 3, 5), {2: 0.0, 3: 0.0, 5: 0.0})
for T in (1e3, 1e4, 1e5):
    integral, ref = tail_energy(b, 0.1, ScanConfig(0.75 + 2j, (1,), T, 0.05, cutoff_X=200))
    print(f"T = {T:>7.0f}: integral / reference = {integral / ref:.3f}")
