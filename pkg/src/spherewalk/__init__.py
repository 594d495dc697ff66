"""Walk-on-spheres Monte Carlo solver for the Poisson Dirichlet problem.

Solves (1/2) lap u = -f in D, u = g on the boundary, in arbitrary
dimension, with sup-norm error bounds, an explicit parameter planner and
a constructive ReLU-network realization of the estimator.
"""

from .geometry import (
    BoundaryExtension,
    CapabilityError,
    Domain,
    DomainKind,
    DomainMetadata,
    SurrogateDistance,
    annular_diameter,
    anisotropic_transform,
    cutoff_profile,
    extend_boundary_data,
    l1_ball_distance,
    l1_ball_project,
    surrogate_from_approx,
    surrogate_from_exact,
)
from .sampling import (
    Channel,
    SamplingError,
    StreamKey,
    green_point,
    green_radius,
    uniform_in_domain,
    uniform_points,
    unit_sphere,
)
from .fields import Field, ball_unit_source_solution, catalog_field, exact_quadratic_solution
from .bounds import (
    ProblemData,
    WosPlan,
    annulus_exit_bound,
    bias_a,
    defective_rate,
    expectation_bound,
    grid_entropy,
    hoeffding_range,
    l2_mean_bound,
    lyapunov_tail,
    mgf_diagnostic,
    plan,
    plan_satisfies,
    point_tail_bound,
    shell_tail_defective,
    shell_tail_general,
    tail_bound,
    v_sup_bound,
)
from .wos import (
    EstimateResult,
    EvaluationError,
    ExitStats,
    WosConfig,
    estimate,
    exit_stats,
    lipschitz_bound,
    lipschitz_probe,
    run_trajectory,
    step,
)

__version__ = "0.1.0"
