"""Geodesics and distances between planar curves under second-order elastic metrics."""
from .bspline import (
    DiscreteCurve,
    DiscretePath,
    FitError,
    SplineConfig,
    SplineConfigError,
    basis_matrix,
    fit_curve,
)
from .config import ConfigError, RunConfig
from .matching import (
    AugLagState,
    MatchProblem,
    MatchResult,
    Transform,
    auglag_objective,
    penalty_objective,
    shape_distance,
    solve,
    solve_auglag,
    solve_penalty,
)
from .metric import (
    DegenerateCurveError,
    MetricParams,
    energy_terms,
    metric_value,
    path_energy,
    path_energy_and_gradient,
    path_energy_gradient,
)
from .optim import OptimResult, OptimSettings, minimize
from .svg import render_svg
from .varifold import (
    VarifoldKernel,
    apply_similarity,
    varifold_dist_sq,
    varifold_dist_sq_gradient,
    varifold_inner,
)

__version__ = "0.1.0"
