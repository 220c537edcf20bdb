"""Sampled verification of first-order variational analysis on manifolds,
with a Cheeger-type graph clustering pipeline on the Stiefel manifold."""

from .manifolds import (
    GeometryError,
    LemmaReport,
    ManifoldDescriptor,
    Point,
    Tangent,
    curvature_norm,
    euclidean,
    exp_map,
    geodesic_distance,
    log_map,
    point_set_distance,
    retract,
    sphere,
    stiefel,
    tangent_project,
    verify_local_distance_lemma,
)
from .stiefel import StiefelPoint
from .cones import (
    PatternCone,
    RefutationVerdict,
    Schedule,
    check_dirderiv_identity,
    check_dist_subdiff_identity,
    contingent_cone_distance,
    contingent_derivative,
    cross_validate_pattern_cone,
    frechet_normal_refute,
    frechet_subdiff_refute,
    pattern_cone_contains,
    stiefel_plus_normal_cone,
    stiefel_plus_sampler,
)
from .wsm import (
    NcVerdict,
    WsmInstance,
    WsmVerdict,
    check_difference_nc,
    check_dual_nc,
    check_primal_nc,
    estimate_modulus,
    verify_wsm_sampled,
)
from .cheeger import (
    BudgetExceededError,
    ClusterReport,
    Graph,
    GraphFormatError,
    SolverConfig,
    SubPartition,
    cheeger_objective,
    cut_boundary,
    dist_upper_estimate,
    exact_cheeger,
    grad_norm_l1,
    indicator_frame,
    lipschitz_bound,
    load_graph,
    penalized_objective,
    penalty_h,
    riemannian_subgradient,
    round_solution,
    solve_relaxation,
    wsm_penalty_check,
)

__version__ = "0.1.0"
