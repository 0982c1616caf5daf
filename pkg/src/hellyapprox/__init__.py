"""No-dimensional Helly approximation in finite-dimensional l_p spaces.

Distances to V-polytopes, certified minimax centers for (colorful) families,
Maurey sampling, the l_inf lower-bound family and bound sweeps.
"""

from .caratheodory import (ColorGroup, MaureyResult, PointCloud, brute_force_best_tuple,
                           colorful_maurey_sample, maurey_sample, weights_for_zero)
from .counterexample import (CounterexampleInstance, Embedding, RealizationError, a_k,
                             build_linf_counterexample, exact_check, float_check, transfer_counterexample)
from .harness import ExperimentConfig, SweepRow, run_sweep
from .helly import (ColorfulFamily, Family, HellyOutcome, LowerCertificate, certificate_to_lower,
                    euclidean_bound, minimize_max_distance, optimality_certificate, upper_bound,
                    verify_kwise_intersection, verify_lower_bound)
from .instances import (SchemaError, generate_rainbow_instance, instance_from_json, instance_to_json,
                        random_cloud, random_color_group)
from .normed_space import (INF, NormSpec, TypeEstimate, dual_norm, dual_type_estimate, norm,
                           norming_functional, rademacher_average, type_constant_tabulated,
                           type_lower_bound)
from .polytope import VPolytope, distance, distance_subgradient, support_value

__version__ = "0.1.0"
