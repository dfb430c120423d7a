"""How the sign of the plant zero decides what the relay loop does.

Keep the poles of (s + 1)(s + 2) and gamma = 3, and slide kappa through
positive, zero and negative values.  A positive kappa (zero in the right
half plane) gives a self-oscillation whose amplitude grows with kappa.
kappa = 0 drives the iterates to the origin, but only like 1/k.  A negative
kappa walks the iterates down by at least 2|kappa| per step until they land
in the chattering set [-|kappa|, |kappa|].

Run with ``python3 demos/zero_sweep.py``.
"""

import numpy as np

from relaycycle import MaxIterExceeded, PlantSpec, certify, iterate_half_map
from relaycycle.filippov import simulate

print("kappa    class                      xi_cycle     half period")
for kappa in (2.0, 1.0, 0.5, 0.1, 0.0, -0.5, -1.0):
    plant = PlantSpec.from_kappa(kappa, 3.0, 3.0, 2.0)
    c = certify(plant)
    xi = f"{c.xi_cycle:.6f}" if c.xi_cycle is not None else "-"
    hp = f"{c.half_period:.6f}" if c.half_period is not None else "-"
    print(f"{kappa:5.2f}    {c.classification.value:25s}  {xi:>10s}   {hp:>10s}")

# With kappa = 0 the map for these poles is exactly xi -> xi / (1 + 2xi/3),
# so xi_k = 3 / (2k + 3).  The decay is real but slow.
plant = PlantSpec.from_kappa(0.0, 3.0, 3.0, 2.0)
try:
    tr = iterate_half_map(plant, 1.0, tol=0.0, max_iter=10_000)
except MaxIterExceeded as exc:
    tr = exc.trace
it = np.array(tr.iterates)
for k in (10, 100, 1000, 10_000):
    print(f"kappa=0, k={k:6d}: xi_k={it[k]:.6e}  3/(2k+3)={3 / (2 * k + 3):.6e}")

# A negative zero: the iterates step down, then the state slides on x2 = 0.
plant = PlantSpec.from_kappa(-1.0, 3.0, 3.0, 2.0)
tr = iterate_half_map(plant, 12.0)
print("\nkappa=-1 iterates:", ", ".join(f"{x:.4f}" for x in tr.iterates))
sim = simulate(plant, [6.0, 0.0])
for ev in sim.events:
    x1 = f"{ev.x1:+.6f}" if ev.x1 is not None else ""
    print(f"  t={ev.t:9.5f}  {ev.kind:15s} {x1}")
