"""Sequence-space norms, equivalent renormings, and verification probes."""

from .vectors import (FiniteVector, SortedVector, TailedVector,
                      FinitePermutation, decreasing_rearrangement,
                      apply_permutation, apply_signs, dilate, restrict,
                      hat_transform, hat_pointwise_sum_bound)
from .norms import (NormDescriptor, IntervalValue, Truncation, NormError,
                    UnsupportedEvaluation, TailNotSummable,
                    SignEnumerationTooLarge, SymmetryPlan,
                    lp, sup_norm, l1_norm, day_norm, lorentz_harmonic,
                    tsirelson_norm, weighted_l2, summing_norm,
                    eval_norm, evaluate, eval_day, eval_lorentz_harmonic,
                    eval_tsirelson, eval_tailed, fundamental_function,
                    estimate_symmetry_constant)
from .combinators import (day_augment, strictly_convex_unconditional_base,
                          eval_strictly_convex_base, shifted_norm,
                          EquivClassEnumeration, os_unconditional_2R,
                          DavisParams, OptimizerError, davis_norm,
                          davis_interpolation, y_space, y_space_norm,
                          symmetric_2R, symmetric_2R_norm)
from .probes import (ProbeReport, Violation, SequenceScenario, BoydReport,
                     BoydRow, boyd_estimate, two_r_probe,
                     strict_convexity_probe, inequality_suite,
                     c0_failure_witness, converging_scenario,
                     normalized_ones_scenario, random_scenario,
                     random_vector)
from .cli import parse_space, format_space, descriptor_to_tree, \
    descriptor_from_tree, SpaceSyntaxError

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
