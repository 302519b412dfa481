"""From the organizing point to a map of nearby dynamics.

Near the point where the oscillatory and steady instabilities meet, the
dynamics collapses onto two interacting amplitudes: rho for the uniform
oscillation, eta for the cosine-mode-6 pattern.  This walkthrough

1. computes the third-order reduction and its planar coefficients,
2. reports the four bifurcation lines that fan out of the origin of the
   (delay offset, diffusion offset) plane,
3. classifies the six wedge-shaped regions between those lines, listing
   the planar equilibria and their stability in each, and
4. integrates the planar system to show which equilibrium attracts.

Run it with no arguments:

    python3 demos/02_normal_form_and_regions.py
"""

from __future__ import annotations

from musselbed import (
    ModelParams,
    bifurcation_lines,
    classify_region,
    equilibria,
    integrate,
    normal_form_at,
    unfolding_case,
)

params = ModelParams(r=1.1, gamma=4.0, alpha=0.654, d=0.05, tau=1.0, l=6.0)

# ---------------------------------------------------------------------------
# 1. The reduction.
#
# normal_form_at pins the parameters at the organizing point, builds the
# center-space eigenvectors, contracts the second- and third-order
# nonlinearity against them (solving the small linear systems for the
# quadratic corrections along the way), and rescales to the planar
# (rho, eta) system.

result = normal_form_at(params)
asys = result.asys
print("planar amplitude system")
print(f"  epsilon = {asys.epsilon:+.0f},  d_hat = {asys.d_hat:+.0f}")
print(f"  b = {asys.b:.6f}, c = {asys.c:.6f}, d_hat - b*c = {asys.d_hat_minus_bc:.6f}")
print(f"  unfolding case: {unfolding_case(asys)}")
print("  offset maps (per unit delay / diffusion offset):")
print(f"    eps1 = {asys.eps1_map.c_tau:+.6e} * tau_eps {asys.eps1_map.c_d:+.6e} * d_eps")
print(f"    eps2 = {asys.eps2_map.c_tau:+.6e} * tau_eps {asys.eps2_map.c_d:+.6e} * d_eps")

# ---------------------------------------------------------------------------
# 2. The bifurcation lines.
#
# L1 carries the oscillation threshold, L2 the pattern threshold; T1 and
# T2 are the secondary lines along which one attractor hands over to the
# other.  Slopes are in the (tau_eps, d_eps) plane; L1 is vertical.

print("\nbifurcation lines d_eps = slope * tau_eps")
for line in bifurcation_lines(asys):
    slope = "vertical (tau_eps = 0)" if line.slope is None else f"{line.slope:+.6e}"
    print(f"  {line.name}: {slope}")

# ---------------------------------------------------------------------------
# 3. The six regions.
#
# Between consecutive lines the set of planar equilibria is constant.
# E1 is the uniform steady state, E2 the uniform oscillation, E3+/- the
# two mirror-image stationary patterns, E4+/- mixed modes.  One sample
# offset per region:

SAMPLES = [
    (-0.5, 0.01),
    (0.5, 0.01),
    (0.5, -0.0005),
    (0.5, -0.0009),
    (0.5, -0.002),
    (-0.5, -0.002),
]

print("\nregion tour (one sample offset per region)")
for tau_eps, d_eps in SAMPLES:
    region = classify_region(asys, tau_eps, d_eps)
    planar = equilibria(asys, tau_eps, d_eps)
    tags = ", ".join(f"{pt.label}:{pt.stability}" for pt in planar.points)
    print(f"  ({tau_eps:+.4g}, {d_eps:+.4g}) -> {region.label}:  {tags}")

# ---------------------------------------------------------------------------
# 4. Watching the planar flow settle.
#
# In the region where only the pattern is stable, every interior start
# drains to E3; the rho-amplitude (oscillation) dies, eta survives.

tau_eps, d_eps = 0.5, -0.002
traj = integrate(asys, tau_eps, d_eps, initial=(0.02, 0.01), horizon=8000.0, dt=0.5)
print("\nplanar flow at the pattern-only sample offset")
print(f"  start  (rho, eta) = ({traj.rho[0]:.4f}, {traj.eta[0]:.4f})")
print(f"  end    (rho, eta) = ({traj.rho[-1]:.6f}, {traj.eta[-1]:.6f})")
stable = [pt for pt in equilibria(asys, tau_eps, d_eps).points
          if pt.stability == "stable node"]
for pt in stable:
    print(f"  stable equilibrium {pt.label} at (rho, eta) = ({pt.rho:.6f}, {pt.eta:+.6f})")
