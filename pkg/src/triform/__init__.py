"""Flip-free formation control for triangulated multi-agent teams.

Distance-only formation potentials admit reflected copies of the target
shape; augmenting each triangle with a signed-area penalty removes them.
This package provides the potentials and their closed-form derivatives,
exact equilibrium enumeration with gain thresholds for the single-follower
problem, a numeric equilibrium finder, gradient-flow simulators for
followers and layered formations, basin-of-attraction mapping, and scenario
file handling, plus a command-line front end (see the triform command).
"""

from .geometry import (
    as_point,
    as_state,
    heron_area,
    rotation_matrix,
    signed_area,
    triangle_inequality_ok,
)
from .potentials import (
    CanonicalTriangleParams,
    PairTerm,
    TriangleTerm,
    agent_control,
    canonical_grad,
    canonical_hessian,
    canonical_potential,
    pair_grad,
    pair_potential,
    triangle_grad,
    triangle_hessian,
    triangle_potential,
)
from .formation import (
    Clique,
    FormationSpec,
    LayerAssignment,
    NotTriangulatedFromRootError,
    TargetCheck,
    ValidationReport,
    Violation,
    extract_layers,
    target_membership,
    validate_spec,
)
from .equilibria import (
    DEGENERATE,
    SADDLE,
    STABLE,
    UNSTABLE,
    CaseReport,
    EquilibriumRecord,
    RefineResult,
    case_table,
    classify_hessian,
    enumerate_general_large_k,
    enumerate_isosceles,
    k_star,
    k_zero,
    refine_numeric,
)
from .simulate import (
    GRADIENT_STOP,
    NON_CONVERGENT,
    NON_FINITE,
    RK4,
    RK45,
    TIME_LIMIT,
    BasinMap,
    ConvergenceReport,
    IntegratorConfig,
    Trajectory,
    basin_sample,
    convergence_report,
    integrate_follower,
    integrate_hierarchy,
    monotone_audit,
    potential_series,
    write_basin,
    write_trajectory,
)
from .scenario import (
    Scenario,
    ScenarioError,
    bundled_scenario,
    canonical_scenario,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from . import numdiff

__version__ = "0.1.0"
