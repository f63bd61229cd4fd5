"""Zonotopes, matrix zonotopes and interval matrices.

All objects are immutable after construction (their arrays are flagged
read-only) and every operation returns a new object.  Arithmetic is plain
float64; no outward rounding is performed, so containment guarantees hold
up to floating-point roundoff.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

DEFAULT_MAX_ORDER = 20.0
DEFAULT_CONTAINS_TOL = 1e-7


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_finite(name: str, a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf")


class Zonotope:
    """Set ``{c + G b : b in [-1, 1]^p}``.

    Parameters
    ----------
    center : array_like, shape (n,)
    generators : array_like, shape (n, p), optional
        Columns are generators.  All-zero columns are dropped.
    """

    __slots__ = ("center", "generators")

    def __init__(self, center, generators=None):
        c = np.asarray(center, dtype=float).reshape(-1)
        n = c.shape[0]
        if generators is None:
            G = np.zeros((n, 0))
        else:
            G = np.asarray(generators, dtype=float)
            if G.ndim == 1:
                G = G.reshape(n, -1) if G.size else np.zeros((n, 0))
            if G.ndim != 2 or G.shape[0] != n:
                raise ValueError(
                    f"generator matrix has shape {G.shape}, expected ({n}, p)"
                )
        _check_finite("center", c)
        _check_finite("generators", G)
        G = G[:, np.any(G != 0.0, axis=0)]
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "generators", _frozen(G))

    def __setattr__(self, name, value):
        raise AttributeError("Zonotope is immutable")

    def __reduce__(self):
        return (Zonotope, (self.center, self.generators))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def num_generators(self) -> int:
        return self.generators.shape[1]

    @property
    def order(self) -> float:
        return self.num_generators / self.dim if self.dim else 0.0

    def is_singleton(self) -> bool:
        return self.num_generators == 0

    def __add__(self, other: Zonotope) -> Zonotope:
        return minkowski_sum(self, other)

    def __rmatmul__(self, M) -> Zonotope:
        return linear_map(M, self)

    def __repr__(self) -> str:
        return f"Zonotope(dim={self.dim}, generators={self.num_generators})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Zonotope):
            return NotImplemented
        return (
            self.center.shape == other.center.shape
            and self.generators.shape == other.generators.shape
            and np.array_equal(self.center, other.center)
            and np.array_equal(self.generators, other.generators)
        )

    __hash__ = None

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "generators": self.generators.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> Zonotope:
        c = np.asarray(d["center"], dtype=float).reshape(-1)
        G = np.asarray(d.get("generators", []), dtype=float)
        if G.size == 0:
            G = np.zeros((c.shape[0], 0))
        return cls(c, G)


class MatrixZonotope:
    """Set of matrices ``{C + sum_i b_i G_i : b in [-1, 1]^q}``.

    ``generators`` is stored as an array of shape (q, rows, cols).
    """

    __slots__ = ("center", "generators")

    def __init__(self, center, generators=None):
        C = np.asarray(center, dtype=float)
        if C.ndim != 2:
            raise ValueError(f"center must be a matrix, got shape {C.shape}")
        if generators is None or len(generators) == 0:
            Gs = np.zeros((0,) + C.shape)
        else:
            Gs = np.asarray(generators, dtype=float)
            if Gs.ndim != 3 or Gs.shape[1:] != C.shape:
                raise ValueError(
                    f"generator stack has shape {Gs.shape}, expected (q, {C.shape[0]}, {C.shape[1]})"
                )
        _check_finite("center", C)
        _check_finite("generators", Gs)
        Gs = Gs[np.any(Gs != 0.0, axis=(1, 2))]
        object.__setattr__(self, "center", _frozen(C))
        object.__setattr__(self, "generators", _frozen(Gs))

    def __setattr__(self, name, value):
        raise AttributeError("MatrixZonotope is immutable")

    def __reduce__(self):
        return (MatrixZonotope, (self.center, self.generators))

    @property
    def shape(self) -> tuple[int, int]:
        return self.center.shape

    @property
    def num_generators(self) -> int:
        return self.generators.shape[0]

    def is_singleton(self) -> bool:
        return self.num_generators == 0

    def __repr__(self) -> str:
        return f"MatrixZonotope(shape={self.shape}, generators={self.num_generators})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixZonotope):
            return NotImplemented
        return (
            self.generators.shape == other.generators.shape
            and np.array_equal(self.center, other.center)
            and np.array_equal(self.generators, other.generators)
        )

    __hash__ = None

    def vectorized(self) -> Zonotope:
        """The same set as a zonotope over row-major flattened matrices."""
        G = self.generators.reshape(self.num_generators, -1).T
        return Zonotope(self.center.reshape(-1), G)

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "generators": self.generators.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> MatrixZonotope:
        C = np.asarray(d["center"], dtype=float)
        if C.ndim == 1:
            C = C.reshape(C.shape[0], -1)
        Gs = d.get("generators", [])
        if len(Gs) == 0:
            return cls(C)
        return cls(C, np.asarray(Gs, dtype=float))


class IntervalMatrix:
    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        lo = np.asarray(lower, dtype=float)
        hi = np.asarray(upper, dtype=float)
        if lo.shape != hi.shape:
            raise ValueError(f"bound shapes differ: {lo.shape} vs {hi.shape}")
        if np.any(lo > hi):
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "lower", _frozen(lo))
        object.__setattr__(self, "upper", _frozen(hi))

    def __setattr__(self, name, value):
        raise AttributeError("IntervalMatrix is immutable")

    def __reduce__(self):
        return (IntervalMatrix, (self.lower, self.upper))

    @property
    def shape(self):
        return self.lower.shape

    def contains(self, X, tol: float = 0.0) -> bool:
        X = np.asarray(X, dtype=float)
        return bool(np.all(X >= self.lower - tol) and np.all(X <= self.upper + tol))

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalMatrix):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    __hash__ = None

    def to_dict(self) -> dict:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> IntervalMatrix:
        return cls(d["lower"], d["upper"])


# ---------------------------------------------------------------------------
# zonotope arithmetic


def linear_map(M, Z: Zonotope) -> Zonotope:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[1] != Z.dim:
        raise ValueError(f"cannot map zonotope of dim {Z.dim} with matrix of shape {M.shape}")
    return Zonotope(M @ Z.center, M @ Z.generators)


def minkowski_sum(Z1: Zonotope, Z2: Zonotope) -> Zonotope:
    if Z1.dim != Z2.dim:
        raise ValueError(f"dimension mismatch: {Z1.dim} vs {Z2.dim}")
    return Zonotope(Z1.center + Z2.center, np.hstack([Z1.generators, Z2.generators]))


def cartesian_product(*zonotopes: Zonotope) -> Zonotope:
    """Stacked set ``Z1 x Z2 x ...`` with block-diagonal generators."""
    if not zonotopes:
        raise ValueError("need at least one zonotope")
    c = np.concatenate([Z.center for Z in zonotopes])
    n = c.shape[0]
    G = np.zeros((n, sum(Z.num_generators for Z in zonotopes)))
    r = k = 0
    for Z in zonotopes:
        G[r : r + Z.dim, k : k + Z.num_generators] = Z.generators
        r += Z.dim
        k += Z.num_generators
    return Zonotope(c, G)


def interval_hull(Z: Zonotope) -> tuple[np.ndarray, np.ndarray]:
    r = np.abs(Z.generators).sum(axis=1)
    return Z.center - r, Z.center + r


def zonotope_from_interval(lower, upper) -> Zonotope:
    lo = np.asarray(lower, dtype=float).reshape(-1)
    hi = np.asarray(upper, dtype=float).reshape(-1)
    if lo.shape != hi.shape:
        raise ValueError(f"bound shapes differ: {lo.shape} vs {hi.shape}")
    if np.any(lo > hi):
        bad = np.flatnonzero(lo > hi).tolist()
        raise ValueError(f"lower > upper in coordinates {bad}")
    return Zonotope((lo + hi) / 2, np.diag((hi - lo) / 2))


def support_value(Z: Zonotope, direction) -> float:
    """Exact support function ``max_{x in Z} d^T x``."""
    d = np.asarray(direction, dtype=float).reshape(-1)
    if d.shape[0] != Z.dim:
        raise ValueError(f"direction has dim {d.shape[0]}, zonotope has dim {Z.dim}")
    if not np.any(d):
        raise ValueError("zero direction")
    return float(d @ Z.center + np.abs(d @ Z.generators).sum())


def support_values(Z: Zonotope, directions: np.ndarray) -> np.ndarray:
    """Support function for each row of ``directions``."""
    D = np.atleast_2d(np.asarray(directions, dtype=float))
    return D @ Z.center + np.abs(D @ Z.generators).sum(axis=1)


def sample(Z: Zonotope, size: int, rng: np.random.Generator) -> np.ndarray:
    """Points ``c + G b`` with ``b`` uniform on the unit cube; shape (size, n)."""
    beta = rng.uniform(-1.0, 1.0, size=(size, Z.num_generators))
    return Z.center + beta @ Z.generators.T


def sample_point(Z: Zonotope, rng: np.random.Generator) -> np.ndarray:
    beta = rng.uniform(-1.0, 1.0, size=Z.num_generators)
    return Z.center + Z.generators @ beta


def _min_inf_norm_solution(G: np.ndarray, r: np.ndarray):
    """Solve ``min ||b||_inf s.t. G b = r``; returns (t, b) or None if infeasible."""
    n, p = G.shape
    cost = np.zeros(p + 1)
    cost[-1] = 1.0
    eye = np.eye(p)
    ones = np.ones((p, 1))
    A_ub = np.block([[eye, -ones], [-eye, -ones]])
    b_ub = np.zeros(2 * p)
    A_eq = np.hstack([G, np.zeros((n, 1))])
    bounds = [(None, None)] * p + [(0.0, None)]
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=r, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    return float(res.x[-1]), res.x[:-1]


def coefficient_norm(Z: Zonotope, x) -> tuple[float, np.ndarray | None]:
    """Smallest ``||b||_inf`` with ``c + G b = x`` (``inf`` if no such b)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != Z.dim:
        raise ValueError(f"point has dim {x.shape[0]}, zonotope has dim {Z.dim}")
    r = x - Z.center
    if Z.num_generators == 0:
        return (0.0, np.zeros(0)) if not np.any(r) else (math.inf, None)
    sol = _min_inf_norm_solution(Z.generators, r)
    if sol is None:
        return math.inf, None
    return sol


def contains_point(Z: Zonotope, x, tol: float = DEFAULT_CONTAINS_TOL) -> bool:
    """Decide ``x in Z`` with coefficients allowed up to ``1 + tol``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != Z.dim:
        raise ValueError(f"point has dim {x.shape[0]}, zonotope has dim {Z.dim}")
    r = x - Z.center
    G = Z.generators
    scale = 1.0 + np.abs(x).max(initial=0.0) + np.abs(Z.center).max(initial=0.0)
    if G.shape[1] == 0:
        return bool(np.abs(r).max(initial=0.0) <= tol * scale)
    radius = np.abs(G).sum(axis=1)
    if np.any(np.abs(r) > (1.0 + tol) * radius + tol * scale):
        return False
    # cheap certificate: minimum-norm coefficients already inside the cube
    beta, *_ = np.linalg.lstsq(G, r, rcond=None)
    if np.abs(beta).max() <= 1.0 + tol and np.abs(G @ beta - r).max() <= 1e-12 * scale:
        return True
    t, _ = coefficient_norm(Z, x)
    return t <= 1.0 + tol


def matrix_coefficient_norm(M: MatrixZonotope, X) -> tuple[float, float]:
    """Membership measure for a matrix: (min ||b||_inf, equality residual)."""
    X = np.asarray(X, dtype=float)
    if X.shape != M.shape:
        raise ValueError(f"matrix has shape {X.shape}, matrix zonotope has shape {M.shape}")
    Zv = M.vectorized()
    t, beta = coefficient_norm(Zv, X.reshape(-1))
    if beta is None:
        return math.inf, math.inf
    resid = float(np.abs(Zv.center + Zv.generators @ beta - X.reshape(-1)).max(initial=0.0))
    return t, resid


def contains_matrix(M: MatrixZonotope, X, tol: float = DEFAULT_CONTAINS_TOL) -> bool:
    t, resid = matrix_coefficient_norm(M, X)
    return t <= 1.0 + tol and resid <= tol * (1.0 + np.abs(np.asarray(X)).max(initial=0.0))


def reduce_order(Z: Zonotope, max_order: float = DEFAULT_MAX_ORDER) -> Zonotope:
    """Enclose ``Z`` by a zonotope with at most ``ceil(max_order * n)`` generators.

    The generators with the smallest ``||g||_1 - ||g||_inf`` are replaced by
    the axis-aligned box enclosing their sum.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    n, p = Z.dim, Z.num_generators
    limit = math.ceil(max_order * n)
    if p <= limit:
        return Z
    G = Z.generators
    crit = np.abs(G).sum(axis=0) - np.abs(G).max(axis=0)
    order = np.argsort(crit, kind="stable")
    n_keep = max(limit - n, 0)
    boxed = order[: p - n_keep]
    kept = np.sort(order[p - n_keep :])
    box = np.diag(np.abs(G[:, boxed]).sum(axis=1))
    return Zonotope(Z.center, np.hstack([G[:, kept], box]))


def project(Z: Zonotope, dims: Sequence[int] = (0, 1)) -> np.ndarray:
    """Vertices of the 2-D projection onto ``dims``, counterclockwise.

    Returns an array of shape (v, 2): one row for a point, two for a segment.
    """
    i, j = (int(d) for d in dims)
    if i == j or not (0 <= i < Z.dim and 0 <= j < Z.dim):
        raise ValueError(f"invalid projection dims {dims} for dim {Z.dim}")
    c = Z.center[[i, j]]
    G = Z.generators[[i, j], :]
    G = G[:, np.any(G != 0.0, axis=0)]
    if G.shape[1] == 0:
        return c.reshape(1, 2)
    # orient every generator into the upper half plane
    flip = (G[1] < 0) | ((G[1] == 0) & (G[0] < 0))
    G = np.where(flip, -G, G)
    angles = np.arctan2(G[1], G[0])
    G = G[:, np.argsort(angles, kind="stable")]
    merged = [G[:, 0]]
    for g in G[:, 1:].T:
        h = merged[-1]
        cross = h[0] * g[1] - h[1] * g[0]
        if abs(cross) <= 1e-12 * np.linalg.norm(h) * np.linalg.norm(g):
            merged[-1] = h + g
        else:
            merged.append(g)
    gens = np.array(merged)
    verts = [c - gens.sum(axis=0)]
    for g in gens:
        verts.append(verts[-1] + 2 * g)
    for g in gens[:-1]:
        verts.append(verts[-1] - 2 * g)
    return np.array(verts)


def polygon_area(vertices: np.ndarray) -> float:
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def polygon_contains(outer: np.ndarray, points: np.ndarray, tol: float = 1e-9) -> bool:
    """All ``points`` inside the convex CCW polygon ``outer`` (tolerance in length units)."""
    outer = np.asarray(outer, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(outer) < 3:
        return False
    for a, b in zip(outer, np.roll(outer, -1, axis=0)):
        e = b - a
        norm = np.hypot(*e)
        if norm == 0:
            continue
        # left-of-edge test with normalised cross product
        cross = (e[0] * (pts[:, 1] - a[1]) - e[1] * (pts[:, 0] - a[0])) / norm
        if np.any(cross < -tol):
            return False
    return True


# ---------------------------------------------------------------------------
# matrix zonotope arithmetic


def matzono_affine(X, M: MatrixZonotope, sign: str = "-") -> MatrixZonotope:
    """``X + M`` or ``X - M`` for a constant matrix ``X``."""
    X = np.asarray(X, dtype=float)
    if X.shape != M.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {M.shape}")
    if sign == "+":
        return MatrixZonotope(X + M.center, M.generators)
    if sign == "-":
        return MatrixZonotope(X - M.center, -M.generators)
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def matzono_mul_matrix(M: MatrixZonotope, H) -> MatrixZonotope:
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != M.shape[1]:
        raise ValueError(f"cannot multiply {M.shape} matrix zonotope by {H.shape} matrix")
    return MatrixZonotope(M.center @ H, M.generators @ H)


def matzono_mul_zonotope(M: MatrixZonotope, Z: Zonotope) -> Zonotope:
    """Enclosure of ``{A z : A in M, z in Z}``.

    Generators are ``C g_j``, ``G_i c`` and the cross terms ``G_i g_j``.
    """
    if M.shape[1] != Z.dim:
        raise ValueError(f"cannot multiply {M.shape} matrix zonotope by zonotope of dim {Z.dim}")
    C, Gs = M.center, M.generators
    c, G = Z.center, Z.generators
    n = C.shape[0]
    parts = [C @ G]
    if Gs.shape[0]:
        parts.append((Gs @ c).T)
        cross = Gs @ G  # (q, n, p)
        parts.append(cross.transpose(1, 0, 2).reshape(n, -1))
    return Zonotope(C @ c, np.hstack(parts))


def interval_matrix_of(M: MatrixZonotope) -> IntervalMatrix:
    r = np.abs(M.generators).sum(axis=0) if M.num_generators else np.zeros(M.shape)
    return IntervalMatrix(M.center - r, M.center + r)


def sample_matrix(M: MatrixZonotope, rng: np.random.Generator) -> np.ndarray:
    beta = rng.uniform(-1.0, 1.0, size=M.num_generators)
    return M.center + np.tensordot(beta, M.generators, axes=1)
