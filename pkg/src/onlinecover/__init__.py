"""Online primal-dual algorithms for covering LPs and bounded covering IPs."""
from .core import (ConstraintRow, InfeasibleError, Instance, InstanceError, SparsityTracker,
                   load_instance, make_instance, normalize_row, read_instance, save_instance,
                   write_instance)
from .clp import ClpState, arrive, check_lemmas, solve_online
from .box import BoxState, arrive_box, bar_x, kc_witness, solve_online_box
from .rounding import IntegralState, advance, greedy_knapsack, run_pipeline
from .oracles import Status, covering_ip, covering_lp, ip_opt, knapsack_opt, lp_opt
from .adversary import ReferenceGD, reference_gd, run_adversary, validate_claims
from .harness import RunReport, gen_random, ratio_sweep, run_cip, run_clp

__version__ = "0.1.0"

__all__ = [
    "ConstraintRow", "InfeasibleError", "Instance", "InstanceError", "SparsityTracker",
    "load_instance", "make_instance", "normalize_row", "read_instance", "save_instance",
    "write_instance", "ClpState", "arrive", "check_lemmas", "solve_online", "BoxState",
    "arrive_box", "bar_x", "kc_witness", "solve_online_box", "IntegralState", "advance",
    "greedy_knapsack", "run_pipeline", "Status", "covering_ip", "covering_lp", "ip_opt",
    "knapsack_opt", "lp_opt", "ReferenceGD", "reference_gd", "run_adversary",
    "validate_claims", "RunReport", "gen_random", "ratio_sweep", "run_cip", "run_clp",
]
