"""Projection directions that make ``scale * sum_i |u_i . x|`` a good estimate of ``||x||``.

The estimate drives a fast two-sample energy statistic: after projecting on
each direction every pairwise distance sum is univariate and costs one sort.
"""

from .approximator import (MSEReport, approx_norm, mc_constant, mc_directions,
                           mse_experiment, mse_monte_carlo, mse_monte_carlo_2d,
                           mse_optimal_2d, mse_orthonormal)
from .energy import (EnergyResult, Sample, energy_statistic_exact,
                     energy_statistic_projected, energy_statistic_univariate,
                     pairwise_abs_sum_cross, pairwise_abs_sum_within)
from .errors import *  # noqa: F401,F403
from .geometry import angle_between, normalize, orthogonal_complement_direction, rank_of
from .objective import (DirectionSet, MinimizerCertificate, ObjectiveReport, SignPattern,
                        evaluate_f, report, v_max, v_min)
from .optimizer import (OptimizerConfig, OptimizerTrace, RootProblem, closed_form_cn_2d,
                        closed_form_ratio_2d, coordinate_ascent, exact_directions_2d,
                        exact_directions_np, find_candidate_thetas, g_theta, lemma4_point,
                        SmoothedRatio, anneal)

__version__ = "0.1.0"
