"""Random walks, harmonic functions and entropy on lamplighter groups."""
__version__ = "0.1.0"

from .groups import (C2, Z, Z2, GroupSpec, GroupSyntaxError, ElementError, BFSCapExceeded,
                     Wreath, WreathElement, parse_group_spec, identity, generators, multiply,
                     inverse, word_length, ball, element_to_json, element_from_json)
from .measures import StepMeasure, MeasureError, move_or_switch, uniform_measure
from .kernel import (KernelTable, KernelError, build_kernel_table, potential_kernel,
                     series_potential_kernel, asymptotic_deviation, KAPPA, LOG_SLOPE)
from .harmonic import (HarmonicFunction, Constant, BaseCoordinate, LampSignTimesKernel,
                       Tabulated, evaluate, harmonicity_residual, residual_scan, growth_profile,
                       lamp_override)
from .entropy import (FiniteDistribution, JointDistribution, entropy, kl_divergence,
                      mutual_information, conditional_entropy, dbtv, exact_walk_distribution,
                      entropy_sequence, check_inequality_suite, harmonic_growth_lower_curve)
from .walks import (Trajectory, StoppingRecord, sample_trajectory, stopping_times,
                    coupled_gluing_experiment, coupling_escape_exact, hitting_probability,
                    exit_time_tail, lamp_law_at_return, excursion_swap_check,
                    stopped_value_expectation)
from .operators import (BinomialTable, FiniteMarkovOperator, finite_difference,
                        verify_derivative_bound, lazy_power_expansion_check,
                        laplacian_drift_estimate)
from .growth import (VisitProfile, visit_count_profile, conditional_entropy_lower_bound,
                     iterated_growth_experiment)
