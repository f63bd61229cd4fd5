"""Data-driven reachability for linear systems and the model-based oracle."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import LinearSystem, TrajectoryData, right_inverse
from .sets import (
    DEFAULT_MAX_ORDER,
    MatrixZonotope,
    Zonotope,
    cartesian_product,
    interval_hull,
    matzono_affine,
    matzono_mul_matrix,
    matzono_mul_zonotope,
    minkowski_sum,
    polygon_contains,
    project,
    reduce_order,
    support_values,
)


@dataclass
class ReachSequence:
    sets: list[Zonotope]
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.sets)

    def __getitem__(self, k) -> Zonotope:
        return self.sets[k]

    @property
    def horizon(self) -> int:
        return len(self.sets) - 1

    @property
    def dim(self) -> int:
        return self.sets[0].dim

    def to_dict(self) -> dict:
        return {"sets": [Z.to_dict() for Z in self.sets], "meta": self.meta}

    @classmethod
    def from_dict(cls, d: dict) -> ReachSequence:
        return cls([Zonotope.from_dict(z) for z in d["sets"]], dict(d.get("meta", {})))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "dim", "lower", "upper"])
        for k, Z in enumerate(self.sets):
            lo, hi = interval_hull(Z)
            for i in range(Z.dim):
                w.writerow([k, i, repr(float(lo[i])), repr(float(hi[i]))])
        return buf.getvalue()


def _input_list(U, N: int) -> list[Zonotope]:
    if isinstance(U, Zonotope):
        return [U] * N
    U = list(U)
    if len(U) < N:
        raise ValueError(f"need {N} input sets, got {len(U)}")
    return U[:N]


def consistent_model_set(data: TrajectoryData, M_w: MatrixZonotope, rank_tol: float = 1e-10) -> MatrixZonotope:
    """Matrix zonotope ``(X_+ - M_w) H`` containing every data-consistent ``[A B]``."""
    H = right_inverse(data.Z, rank_tol)
    return matzono_mul_matrix(matzono_affine(data.X_plus, M_w, "-"), H)


def propagate_linear(
    M_Sigma: MatrixZonotope,
    X0: Zonotope,
    U,
    Z_w: Zonotope,
    N: int,
    max_order: float = DEFAULT_MAX_ORDER,
    mode: str = "data-driven-linear",
) -> ReachSequence:
    n = X0.dim
    if N < 0:
        raise ValueError("horizon must be non-negative")
    Us = _input_list(U, N)
    if M_Sigma.shape[0] != n or Z_w.dim != n:
        raise ValueError(f"model set has shape {M_Sigma.shape}, noise dim {Z_w.dim}, state dim {n}")
    if any(M_Sigma.shape[1] != n + Uk.dim for Uk in Us):
        raise ValueError(f"model set has {M_Sigma.shape[1]} columns, inconsistent with input sets")
    sets = [X0]
    for k in range(N):
        R = matzono_mul_zonotope(M_Sigma, cartesian_product(sets[k], Us[k]))
        sets.append(reduce_order(minkowski_sum(R, Z_w), max_order))
    meta = {
        "mode": mode,
        "horizon": N,
        "max_order": max_order,
        "generator_counts": [Z.num_generators for Z in sets],
        "guaranteed": True,
    }
    return ReachSequence(sets, meta)


def model_based_reach(
    sys: LinearSystem, X0: Zonotope, U, Z_w: Zonotope, N: int, max_order: float = DEFAULT_MAX_ORDER
) -> ReachSequence:
    return propagate_linear(MatrixZonotope(sys.AB), X0, U, Z_w, N, max_order, mode="model-based")


def random_directions(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    D = rng.standard_normal((count, n))
    return D / np.linalg.norm(D, axis=1, keepdims=True)


@dataclass
class InclusionReport:
    worst_margins: list[float]
    passed: bool
    polygon_certified: list[bool] | None = None
    tol: float = 1e-9

    def to_dict(self) -> dict:
        return {
            "worst_margins": self.worst_margins,
            "passed": self.passed,
            "polygon_certified": self.polygon_certified,
            "tol": self.tol,
        }

    @classmethod
    def from_dict(cls, d: dict) -> InclusionReport:
        return cls(d["worst_margins"], d["passed"], d.get("polygon_certified"), d.get("tol", 1e-9))


def inclusion_check(
    inner: ReachSequence,
    outer: ReachSequence,
    directions: int = 100,
    seed=0,
    tol: float = 1e-9,
) -> InclusionReport:
    """Sampled support dominance ``h_inner(d) <= h_outer(d)`` at every step.

    The margin is ``h_outer - h_inner``; the check passes when every margin is
    at least ``-tol``.  For ``n == 2`` each step additionally gets an exact
    polygon-in-polygon certificate.
    """
    if len(inner) != len(outer) or inner.dim != outer.dim:
        raise ValueError("sequences differ in horizon or dimension")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    D = random_directions(inner.dim, directions, rng)
    margins = []
    for Zi, Zo in zip(inner.sets, outer.sets):
        margins.append(float(np.min(support_values(Zo, D) - support_values(Zi, D))))
    certified = None
    if inner.dim == 2:
        certified = []
        for Zi, Zo in zip(inner.sets, outer.sets):
            Po = project(Zo, (0, 1))
            Pi = project(Zi, (0, 1))
            certified.append(bool(len(Po) >= 3 and polygon_contains(Po, Pi, tol)))
    return InclusionReport(margins, all(m >= -tol for m in margins), certified, tol)
