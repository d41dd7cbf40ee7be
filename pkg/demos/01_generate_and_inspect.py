"""Generate a benchmark-style instance and look at what's inside it.

Customers land uniformly in a 50 km square around the depot, travel times are
Euclidean at 1 km/min, service means are uniform on [30, 60] minutes.
"""

import numpy as np

from hsara import generate_instance, write_instance

inst = generate_instance(n=12, seed=7)

print(f"{inst.n} customers, horizon L = {inst.horizon_L} min")
print(f"costs: hire {inst.costs.cf}, travel {inst.costs.ct}/min, "
      f"overtime {inst.costs.co}/min")
print(f"depot at {inst.coords[0]}, customer 1 at {inst.coords[1].round(2)}")
print(f"t(0,1) = {inst.travel(0, 1):.2f} min, s(1) = {inst.service(1):.1f} min, "
      f"p(1) = {inst.cancel(1)}")

# the triangle inequality holds by construction (Euclidean distances)
inst.assert_triangle_inequality()
t = inst.travel_mean
detour = t[0, 1] + t[1, 2] - t[0, 2]
print(f"sample detour slack t(0,1)+t(1,2)-t(0,2) = {detour:.2f} >= 0")

print(f"mean service time {np.mean(inst.service_mean):.1f} min")

write_instance(inst, "/tmp/demo_instance.json")
print("wrote /tmp/demo_instance.json")
