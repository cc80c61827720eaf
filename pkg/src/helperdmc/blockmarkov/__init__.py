"""Block-Markov superposition coding with a helper: joint law, rates, simulator."""
from .spec import (
    BlockMarkovSpec,
    EmptyRateRegion,
    JointTooLarge,
    RateTuple,
    bm_joint,
    bm_rate,
    bm_rate_dominated_by_mc_capacity,
    bm_rate_feasible_region,
    check_rate_constraints,
    load_bm_spec,
    random_bm_spec,
    rate_information,
)
from .sim import SearchCapExceeded, SimConfig, SimReport, simulate_block_markov

__all__ = [
    "BlockMarkovSpec", "EmptyRateRegion", "JointTooLarge", "RateTuple", "SearchCapExceeded",
    "SimConfig", "SimReport", "bm_joint", "bm_rate", "bm_rate_dominated_by_mc_capacity",
    "bm_rate_feasible_region", "check_rate_constraints", "load_bm_spec", "random_bm_spec",
    "rate_information", "simulate_block_markov",
]
