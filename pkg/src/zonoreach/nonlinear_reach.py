"""Data-driven reachability for Lipschitz nonlinear systems.

Each step fits an affine model around the centers of the current state and
input sets by least squares, bounds the fit residual over all data points
(model mismatch plus linearization remainder, widened by the noise bound)
and optionally adds a Lipschitz covering term.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .data import (
    InsufficientExcitationError,
    TrajectoryData,
    build_noise_matrix_zonotope,
    regressor_matrix,
    right_inverse,
)
from .linear_reach import ReachSequence, _input_list
from .sets import (
    DEFAULT_MAX_ORDER,
    MatrixZonotope,
    Zonotope,
    cartesian_product,
    interval_hull,
    interval_matrix_of,
    linear_map,
    minkowski_sum,
    reduce_order,
    zonotope_from_interval,
)


@dataclass(frozen=True)
class LinearizationPoint:
    x_star: np.ndarray
    u_star: np.ndarray

    @property
    def z_star(self) -> np.ndarray:
        return np.concatenate([np.ravel(self.x_star), np.ravel(self.u_star)])


@dataclass(frozen=True)
class LipschitzInfo:
    L_star: float
    delta: float
    source: str = "user-supplied"

    def __post_init__(self):
        if self.L_star < 0 or self.delta < 0:
            raise ValueError("Lipschitz constant and covering radius must be non-negative")

    @property
    def epsilon(self) -> float:
        return self.L_star * self.delta


class StepRankError(InsufficientExcitationError):
    def __init__(self, step: int, cause: InsufficientExcitationError):
        self.step = step
        super().__init__(
            cause.rank,
            cause.required,
            f"step {step}: augmented data matrix has rank {cause.rank} < {cause.required} "
            "(increase T or excitation)",
        )


def lsq_linearized_model(data: TrajectoryData, zp: LinearizationPoint, C_Mw) -> np.ndarray:
    """Least-squares ``[f(z*) A~ B~] = (X_+ - C_Mw) D``, shape (n, 1 + n + m)."""
    Xi = regressor_matrix(data, zp.z_star)
    D = right_inverse(Xi)
    return (data.X_plus - np.asarray(C_Mw, dtype=float)) @ D


def mismatch_matrix_zonotope(
    M_tilde, data: TrajectoryData, M_w: MatrixZonotope, zp: LinearizationPoint
) -> MatrixZonotope:
    """Residual set ``X_+ - M_w - M~ [1; X_- - x*; U_- - u*]``."""
    Xi = regressor_matrix(data, zp.z_star)
    M_tilde = np.asarray(M_tilde, dtype=float)
    if M_tilde.shape != (data.n, Xi.shape[0]):
        raise ValueError(f"model has shape {M_tilde.shape}, expected {(data.n, Xi.shape[0])}")
    if M_w.shape != data.X_plus.shape:
        raise ValueError(f"noise set has shape {M_w.shape}, data has {data.X_plus.shape}")
    return MatrixZonotope(data.X_plus - M_w.center - M_tilde @ Xi, -M_w.generators)


def lagrange_zonotope(M_L: MatrixZonotope) -> Zonotope:
    """Box over all columns of ``M_L``: row-wise min of lower / max of upper limits."""
    I = interval_matrix_of(M_L)
    return zonotope_from_interval(I.lower.min(axis=1), I.upper.max(axis=1))


def _regressors_and_values(data: TrajectoryData) -> tuple[np.ndarray, np.ndarray]:
    return data.Z.T, data.X_plus.T


def estimate_lipschitz(data: TrajectoryData, min_dist: float = 1e-12) -> float:
    """Largest pairwise slope ``||x+_i - x+_j|| / ||z_i - z_j||`` over the data.

    Successor states stand in for ``f(z_i)``; noise only inflates the estimate.
    """
    Z, F = _regressors_and_values(data)
    if Z.shape[0] < 2:
        raise ValueError("need at least two data points")
    dz = pdist(Z)
    df = pdist(F)
    ok = dz >= min_dist
    if not np.any(ok):
        raise ValueError("all data point pairs coincide")
    return float(np.max(df[ok] / dz[ok]))


def estimate_dispersion(data: TrajectoryData) -> float:
    """Largest nearest-neighbour distance among the data points ``z_i``."""
    Z, _ = _regressors_and_values(data)
    if Z.shape[0] < 2:
        raise ValueError("need at least two data points")
    d = cdist(Z, Z)
    np.fill_diagonal(d, np.inf)
    return float(d.min(axis=1).max())


def estimate_lipschitz_info(data: TrajectoryData) -> LipschitzInfo:
    return LipschitzInfo(estimate_lipschitz(data), estimate_dispersion(data), "estimated")


def epsilon_zonotope(L_star: float, delta: float, n: int) -> Zonotope:
    if L_star < 0 or delta < 0:
        raise ValueError("Lipschitz constant and covering radius must be non-negative")
    return Zonotope(np.zeros(n), L_star * delta * np.eye(n))


def propagate_nonlinear(
    data: TrajectoryData,
    X0: Zonotope,
    U,
    Z_w: Zonotope,
    N: int,
    lipschitz: LipschitzInfo | str = "neglect",
    max_order: float = DEFAULT_MAX_ORDER,
    M_w: MatrixZonotope | None = None,
) -> ReachSequence:
    """Reachable-set enclosures with re-linearization at the set centers.

    ``lipschitz`` is a :class:`LipschitzInfo`, ``"estimate"`` (pairwise data
    estimators) or ``"neglect"`` (covering term dropped; the result is then
    not guaranteed and flagged as such in ``meta``).
    """
    n = X0.dim
    if N < 0:
        raise ValueError("horizon must be non-negative")
    if data.n != n or Z_w.dim != n:
        raise ValueError(f"state dim {n}, data dim {data.n}, noise dim {Z_w.dim}")
    Us = _input_list(U, N)
    if any(Uk.dim != data.m for Uk in Us):
        raise ValueError(f"input sets must have dim {data.m}")
    if M_w is None:
        M_w = build_noise_matrix_zonotope(Z_w, data.T)

    if isinstance(lipschitz, str):
        if lipschitz == "estimate":
            lipschitz = estimate_lipschitz_info(data)
        elif lipschitz != "neglect":
            raise ValueError(f"unknown lipschitz mode {lipschitz!r}")
    Z_eps = None if lipschitz == "neglect" else epsilon_zonotope(lipschitz.L_star, lipschitz.delta, n)

    one = Zonotope([1.0])
    sets = [X0]
    diagnostics = []
    for k in range(N):
        zp = LinearizationPoint(sets[k].center, Us[k].center)
        try:
            M_tilde = lsq_linearized_model(data, zp, M_w.center)
        except InsufficientExcitationError as exc:
            raise StepRankError(k, exc) from exc
        Z_L = lagrange_zonotope(mismatch_matrix_zonotope(M_tilde, data, M_w, zp))
        # the affine model acts on deviations from the linearization point
        shifted = cartesian_product(
            one,
            Zonotope(sets[k].center - zp.x_star, sets[k].generators),
            Zonotope(Us[k].center - zp.u_star, Us[k].generators),
        )
        R = minkowski_sum(minkowski_sum(linear_map(M_tilde, shifted), Z_w), Z_L)
        if Z_eps is not None:
            R = minkowski_sum(R, Z_eps)
        sets.append(reduce_order(R, max_order))
        lo, hi = interval_hull(Z_L)
        diagnostics.append(
            {
                "k": k,
                "z_star": zp.z_star.tolist(),
                "rank_ok": True,
                "Z_L_interval": {"lower": lo.tolist(), "upper": hi.tolist()},
                "L_star": None if Z_eps is None else lipschitz.L_star,
                "delta": None if Z_eps is None else lipschitz.delta,
                "epsilon_used": 0.0 if Z_eps is None else lipschitz.epsilon,
            }
        )
    meta = {
        "mode": "data-driven-nonlinear",
        "horizon": N,
        "max_order": max_order,
        "generator_counts": [Z.num_generators for Z in sets],
        "guaranteed": Z_eps is not None,
        "lipschitz": "neglect" if Z_eps is None else lipschitz.source,
        "diagnostics": diagnostics,
    }
    return ReachSequence(sets, meta)
