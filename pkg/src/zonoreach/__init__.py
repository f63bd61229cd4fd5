"""Reachable-set over-approximation of unknown systems from noisy trajectory data."""

__version__ = "0.1.0"

from .sets import (  # noqa: E402
    IntervalMatrix,
    MatrixZonotope,
    Zonotope,
    cartesian_product,
    contains_point,
    interval_hull,
    interval_matrix_of,
    linear_map,
    matzono_affine,
    matzono_mul_matrix,
    matzono_mul_zonotope,
    minkowski_sum,
    project,
    reduce_order,
    support_value,
    zonotope_from_interval,
)
from .data import (  # noqa: E402
    InsufficientExcitationError,
    LinearSystem,
    NonlinearSystem,
    TrajectoryData,
    assemble,
    build_noise_matrix_zonotope,
    generate_dataset,
    rank_report,
    right_inverse,
    simulate_linear,
    simulate_nonlinear,
)
from .linear_reach import (  # noqa: E402
    ReachSequence,
    consistent_model_set,
    inclusion_check,
    model_based_reach,
    propagate_linear,
)
from .nonlinear_reach import (  # noqa: E402
    LinearizationPoint,
    LipschitzInfo,
    estimate_dispersion,
    estimate_lipschitz,
    propagate_nonlinear,
)
