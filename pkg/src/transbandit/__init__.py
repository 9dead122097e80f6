"""Pure-exploration transductive linear bandits: RAGE, optimal designs and baselines."""

from .baselines import StaticRunResult, xy_oracle_run, xy_static_run
from .bounds import gauge, gauge_set, lemma3_bounds, lower_bound, psi_star, rho, theorem2_bound
from .design import (Design, DirectionSet, SolverConfig, directions, min_max_design,
                     star_directions)
from .env import (Instance, RewardOracle, gen_benchmark, gen_many_arms, gen_sphere,
                  gen_transductive, make_rng)
from .linalg import SampleBatch, design_matrix, inv_norm_sq, least_squares
from .rage import PhaseRecord, RunResult, eliminate, rage_run
from .rounding import Allocation, apportion, min_samples

__version__ = "0.1.0"
