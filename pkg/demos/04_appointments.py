"""Monte-Carlo appointment scheduling on top of a routing solution.

Travel times go lognormal (variance from the mean/std-dev relation), service
times exponential, cancellations Bernoulli. Appointments sit at the alpha
percentile of simulated arrivals, so alpha trades teams' idle time against
customers' waiting.
"""

from hsara import (ColGenConfig, ScheduleConfig, calibrate, evaluate_costs,
                   generate_instance, run_colgen, schedule_solution)

inst = generate_instance(n=10, seed=5)
solution = run_colgen(inst, ColGenConfig(method="hm"))
model = calibrate(inst)

for alpha in (0.05, 0.5, 0.95):
    cfg = ScheduleConfig(alpha=alpha, replicas=500, seed=11)
    schedules = schedule_solution(inst, model, solution, cfg)
    costs = evaluate_costs(inst, model, solution, schedules,
                           eval_replicas=2000, seed=99)
    rates = [r for s in schedules for r in s.on_time_rate.values()]
    print(f"alpha={alpha:4}: earliness {costs.earliness:7.1f}  "
          f"delay {costs.delay:7.1f}  overtime {costs.overtime:6.1f}  "
          f"total {costs.total:8.1f}  mean on-time {sum(rates)/len(rates):.2f}")

cfg = ScheduleConfig(alpha=0.5, replicas=500, seed=11)
schedules = schedule_solution(inst, model, solution, cfg)
print("\nappointments for route 0 at alpha=0.5:")
for c in schedules[0].route.customers:
    print(f"  customer {c}: minute {schedules[0].appointments[c]:6.1f}")
