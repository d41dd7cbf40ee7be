"""Route-first cluster-second in slow motion.

Build the giant tour from a spanning-tree walk, then split it optimally into
depot-rooted routes on the trip DAG.
"""

from hsara import approx_tsp_tour, generate_instance, minimum_spanning_tree, split

inst = generate_instance(n=15, seed=3)

tree = minimum_spanning_tree(inst)
print(f"MST weight: {tree.weight:.1f}")

tour = approx_tsp_tour(inst)
print(f"giant tour: {' -> '.join(map(str, tour.order))} -> 0")
print(f"tour cost {tour.tour_cost:.1f} <= 2 x MST weight {2 * tree.weight:.1f}")

routes = split(inst, tour)
print(f"\nsplit into {len(routes)} routes:")
total = 0.0
for k, r in enumerate(routes):
    print(f"  route {k}: {list(r.customers)}  cost {r.cost:.1f} "
          f"(travel {r.travel_time:.1f}, overtime {r.overtime:.1f})")
    total += r.cost
print(f"initial solution objective: {total:.1f}")
