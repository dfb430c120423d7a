"""A plant with complex poles, and how the half map behaves for big inputs.

For (-s + 1) / (s^2 + 2s + 2) the poles are -1 +/- i.  Starting far out on
the switching line, the output makes almost exactly half a turn before it
crosses again, so tau+ tends to pi / omega and the map scales by
exp(-sigma pi / omega).

Run with ``python3 demos/complex_poles.py``.
"""

import math

from relaycycle import PlantSpec, certify
from relaycycle.flow import branch_for
from relaycycle.switching import f_plus, tau_plus

plant = PlantSpec(b1=-1.0, b0=1.0, a1=2.0, a2=2.0)
br = branch_for(plant)
print(f"poles -{br.sigma} +/- {br.omega}i, pi/omega = {math.pi / br.omega:.6f}, "
      f"exp(-sigma pi/omega) = {math.exp(-br.sigma * math.pi / br.omega):.6f}")
print("\n        xi      tau+        |f+(xi)| / xi")
for xi in (1.0, 10.0, 1e2, 1e4, 1e6):
    print(f"{xi:10.0e}  {tau_plus(plant, xi):.8f}  {abs(f_plus(plant, xi)) / xi:.8f}")

# The map gains at most a factor below one far out, so a cycle exists and
# the iteration finds it.
c = certify(plant)
print(f"\n{c.classification.value}: xi={c.xi_cycle:.10f}, period={c.period:.10f}, "
      f"multiplier={c.half_map_multiplier:+.6f}")
