"""Walk through the relay loop around (-s + 3) / (s^2 + 3s + 2).

The plant has a positive zero, so the relay loop oscillates.  We build the
half return map from its closed form, iterate it to the fixed point, certify
the cycle and confirm it with the simulator.

Run with ``python3 demos/rhp_zero_walkthrough.py``.
"""

import math

import numpy as np

from relaycycle import (PlantSpec, SimConfig, certify, critical_time,
                        iterate_half_map, simulate, switching_sequence)
from relaycycle.switching import f_plus, f_plus_prime, tau_plus

plant = PlantSpec(b1=-1.0, b0=3.0, a1=3.0, a2=2.0)
print(f"plant {plant}: kappa={plant.kappa}, gamma={plant.gamma}")

# Starting on the switching line at x = (xi, 0) with the relay at +1, the
# output x2 first rises, peaks at tau*, and comes back to zero at tau+.
# For this plant both times have closed forms, which makes a good check.
print("\n   xi    tau*      tau+      log((2xi+5)/3)  f+(xi)      f+'(xi)")
for xi in (0.0, 1.0, 2.0, 5.0):
    print(f"{xi:5.1f}  {critical_time(plant, xi):.6f}  {tau_plus(plant, xi):.6f}"
          f"  {math.log((2 * xi + 5) / 3):.6f}        {f_plus(plant, xi):+.6f}"
          f"  {f_plus_prime(plant, xi):+.6f}")

# By odd symmetry the full return map is two half maps, so a symmetric
# cycle is a fixed point of xi -> -f+(xi).  Iterating from 0 converges
# geometrically with ratio |f+'(2)| = 1/9.
tr = iterate_half_map(plant, 0.0)
print(f"\niteration from 0 converged={tr.converged} in {len(tr.iterates) - 1} steps")
print("iterates:", ", ".join(f"{x:.10f}" for x in tr.iterates[:8]), "...")

cert = certify(plant)
print(f"\nclassification        {cert.classification.value}")
print(f"xi on the cycle       {cert.xi_cycle:.12f}")
print(f"half period           {cert.half_period:.12f}   (log 3 = {math.log(3):.12f})")
print(f"output amplitude      {cert.output_amplitude:.12f}")
print(f"half map multiplier   {cert.half_map_multiplier:+.12f}")
print(f"return multiplier     {cert.full_return_multiplier:.12f}")
print(f"contraction bound     {cert.contraction_bound:.6f} on [0, {cert.certified_interval_theta:.3f}]")

# The simulator knows nothing about the closed form.  It integrates the
# switched field with RK4 and locates each crossing of x2 = 0.
sim = simulate(plant, [0.0, 0.0], SimConfig(t_max=30.0, initial_sign=1))
seq = switching_sequence(sim)
closed = [0.0]
for _ in range(len(seq)):
    closed.append(-f_plus(plant, closed[-1]))
err = np.max(np.abs(np.array(seq) - np.array(closed[1:])))
print(f"\nsimulator: {len(seq)} crossings from the origin, max deviation from "
      f"the closed-form sequence {err:.2e}")
cr = sim.crossings
print(f"last crossing gap {cr[-1].t - cr[-2].t:.9f} vs half period {cert.half_period:.9f}")
