"""Prototype selection by prize-collecting set cover.

Given training points with labels and a pool of candidate prototypes, pick a
prototype set per class so that each class's epsilon-balls cover many of its
own points and few of the others, then classify by nearest prototype.
"""

from .classifier import ClassificationResult, classify, test_error
from .coverage import CoverageIncidence, build_incidence, evaluate_objective, prototype_cost
from .data_model import (CandidateSet, Dataset, InputError, ObjectiveBreakdown,
                         PrototypeSolution, PvmConfig, validate_inputs)
from .dissimilarity import (distance_quantile, epsilon_grid, euclidean_matrix,
                            kernel_to_distance, rank_transform)
from .greedy import GreedyState, greedy_per_class, greedy_select
from .harness import (CvResult, brute_force_joint, brute_force_optimum, gen_mixture,
                      kfold_cv, one_se_select, select_prototypes, stratified_folds)
from .lp_round import (ClassLp, LpSolution, RoundingDraw, build_class_lp, lp_round,
                       randomized_round, rounding_bound, rounding_draw, solve_lp,
                       solve_relaxation)
from .simplex import LpError, simplex

__version__ = "0.1.0"
