"""Weighted low-rank approximation and its reductions from the maximum-edge biclique problem."""
from .analysis import (BoundReport, check_lemma1, check_lemma2, check_lemma3_sandwich, check_lemma4,
                       check_lemma5, check_lemma6, extract_biclique, lemma_battery, recover_biclique_count,
                       sample_candidates)
from .biclique import Biclique, BipartiteGraph, brute_force_max_biclique, max_edge_biclique, maximal_bicliques
from .core import (CompletionResult, FactorPair, MaskedMatrix, WeightMatrix, rank_one_completion_check,
                   weighted_sq_norm, wlra_objective)
from .estimator import WeightedLowRankApproximation
from .exceptions import (CapacityError, ConstraintError, DegenerateInputError, DimensionError, FormatError,
                         HypothesisViolationError, InconsistencyError, ParameterError, WLRAError)
from .reductions import (ReductionInstance, WitnessParams, build_block_rank_r, build_md1d, build_w1d,
                         lemma3_d, lemma6_d, md1d_witness, penalty_value, rank_one_weight_reduce,
                         rescale_theorem1, rescale_theorem2)
from .solver import (SolveConfig, SolveResult, closed_form_u, closed_form_v, grid_local_minima, landscape_grid,
                     solve_from, solve_rank_one, solve_rank_r)

__version__ = "0.1.0"
