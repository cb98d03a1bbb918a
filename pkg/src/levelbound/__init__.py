"""Fitness-level hitting-time bounds for the elitist (1+1) EA.

Exact level-transition kernels on Hamming-symmetric pseudo-Boolean
functions, every linear-bound coefficient family (constants, viscosity,
visit probabilities, recursive tables, and the non-recursive digraph
products), sub-digraph analysis for landscapes with shortcuts, exact and
Monte Carlo oracles, and a CLI that ties it together.
"""

from .bounds import (AppendixProducts, BoundReport, CoefficientTable, Method,
                     appendix_products, assemble_bound, coeff_conditional_upper,
                     coeff_constant, coeff_digraph_product, coeff_ratio,
                     coeff_recursive, coeff_viscosity, coeff_visit_probability,
                     coefficient_floor_check, KernelProvider,
                     paper_analytic_bound, paper_analytic_provider,
                     printed_coefficient, provider_discrepancies)
from .errors import (AbsorbingLevelError, GuardError, LevelboundError,
                     UnsupportedPartitionError)
from .levels import (LevelDigraph, LevelKernel, LevelPartition, ProblemSpec,
                     build_digraph, build_kernel, build_partition,
                     conditional_probability, weight_transition_probability,
                     weight_transition_probability_exact)
from .oracle import (OracleResult, exact_full_hitting, exact_level_hitting,
                     exact_visit_probabilities, path_sum_coefficient)
from .shortcuts import (ShortcutPair, ShortcutReport, SubDigraphSpec,
                        build_subdigraph, detect_shortcuts, preset_subset)
from .simulate import SimulationConfig, SimulationResult, available_engines, run_trials

__version__ = "0.1.0"

__all__ = [
    "AbsorbingLevelError", "AppendixProducts", "BoundReport", "CoefficientTable",
    "GuardError", "KernelProvider", "LevelDigraph", "LevelKernel",
    "LevelPartition", "LevelboundError", "Method", "OracleResult", "ProblemSpec",
    "ShortcutPair", "ShortcutReport", "SimulationConfig", "SimulationResult",
    "SubDigraphSpec", "UnsupportedPartitionError", "appendix_products",
    "assemble_bound", "available_engines", "build_digraph", "build_kernel",
    "build_partition", "build_subdigraph", "coeff_conditional_upper",
    "coeff_constant", "coeff_digraph_product", "coeff_ratio", "coeff_recursive",
    "coeff_viscosity", "coeff_visit_probability", "coefficient_floor_check",
    "conditional_probability", "detect_shortcuts", "exact_full_hitting",
    "exact_level_hitting", "exact_visit_probabilities", "paper_analytic_bound",
    "paper_analytic_provider", "path_sum_coefficient", "preset_subset",
    "printed_coefficient", "provider_discrepancies", "run_trials",
    "weight_transition_probability", "weight_transition_probability_exact",
    "__version__",
]
