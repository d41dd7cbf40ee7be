"""Home service fleet sizing, routing, and appointment scheduling."""

from .colgen import (ColGenConfig, RmpState, SarSolution, gap, initial_columns,
                     run_colgen, sar_oracle)
from .instance import (CostParams, GeneratorParams, Instance, InstanceError,
                       generate_instance, read_instance, read_travel_csv,
                       write_instance)
from .milp import (IpSolution, KernelError, LinearProgram, LpSolution, solve_ip,
                   solve_lp)
from .pricing import PricedPath, PricingError, exact_price, heuristic_price
from .scheduler import (CostBreakdown, RouteSchedule, ScheduleConfig,
                        evaluate_costs, schedule_route, schedule_solution,
                        scheduled_return_time)
from .split import Route, route_cost, split
from .stochastics import (CalibratedModel, MomentEstimates, Realization,
                          bernoulli_from_estimate, calibrate,
                          calibrate_from_moments, exponential_from_mean,
                          fit_moments, lognormal_from_moments, sample,
                          variance_from_mean)
from .tsp import GiantTour, approx_tsp_tour, minimum_spanning_tree

__version__ = "0.1.0"
