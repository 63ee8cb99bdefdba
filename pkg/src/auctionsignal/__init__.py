"""Revenue-maximizing signaling for probabilistic single-item second-price auctions."""

from .errors import (AuctionSignalError, GuardExceededError, InfeasibleAtBetaError,
                     NumericFailureError, ValidationError)
from .model import (BayesInstance, KnownInstance, SchemeReport, SignalingScheme,
                    instance_from_json, instance_to_json, labels, make_report,
                    merge_equal_label_signals, optimal_welfare_star, revenue,
                    scheme_from_json, scheme_to_json, second_max, trivial_schemes,
                    validate_scheme, welfare)
from .solver_known import (ClusterPartition, build_lp1, clustering_bound,
                           clustering_bruteforce, clustering_revenue,
                           solve_optimal, solve_welfare_constrained, welfare_repair)
from .solver_bayes import (Region, build_lp2, enumerate_regions,
                           reduce_to_m_signals, solve_fixed_k, solve_fixed_m)
from .gadgets import (CutScheme, GraphSpec, cut_to_scheme, gen_gap, gen_identity,
                      gen_many_signals, gen_maxcut, maxcut_bruteforce,
                      random_instance, random_search)
from .simulate import SimReport, simulate_revenue, truthfulness_check

__version__ = "0.1.0"

__all__ = [
    "AuctionSignalError", "ValidationError", "GuardExceededError",
    "NumericFailureError", "InfeasibleAtBetaError",
    "KnownInstance", "BayesInstance", "SignalingScheme", "SchemeReport",
    "validate_scheme", "second_max", "revenue", "welfare",
    "optimal_welfare_star", "labels", "merge_equal_label_signals",
    "trivial_schemes", "make_report",
    "instance_to_json", "instance_from_json", "scheme_to_json", "scheme_from_json",
    "ClusterPartition", "build_lp1", "solve_optimal", "solve_welfare_constrained",
    "welfare_repair", "clustering_revenue", "clustering_bruteforce",
    "clustering_bound",
    "Region", "build_lp2", "solve_fixed_k", "enumerate_regions", "solve_fixed_m",
    "reduce_to_m_signals",
    "GraphSpec", "CutScheme", "gen_identity", "gen_many_signals", "gen_gap",
    "gen_maxcut", "cut_to_scheme", "maxcut_bruteforce", "random_instance",
    "random_search",
    "SimReport", "simulate_revenue", "truthfulness_check",
    "__version__",
]
