"""Trajectory generation, data-matrix assembly and right-inverses."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .sets import MatrixZonotope, Zonotope, sample_point

DEFAULT_RANK_TOL = 1e-10


class InsufficientExcitationError(ValueError):
    """Stacked data matrix lacks full row rank; no right-inverse exists."""

    def __init__(self, rank: int, required: int, message: str | None = None):
        self.rank = rank
        self.required = required
        super().__init__(
            message
            or f"data not sufficiently exciting: rank {rank} < required {required} "
            "(increase T or excitation)"
        )


@dataclass(frozen=True)
class LinearSystem:
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got {A.shape}")
        if B.shape[0] != A.shape[0]:
            raise ValueError(f"B has {B.shape[0]} rows, A has {A.shape[0]}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
            raise ValueError("system matrices must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def AB(self) -> np.ndarray:
        return np.hstack([self.A, self.B])

    def __call__(self, x, u):
        return self.A @ x + self.B @ u


@dataclass(frozen=True)
class NonlinearSystem:
    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    n: int
    m: int
    name: str = ""

    def __call__(self, x, u):
        return np.asarray(self.f(x, u), dtype=float)


@dataclass
class Trajectory:
    states: np.ndarray  # (n, T_i + 1)
    inputs: np.ndarray  # (m, T_i)
    noises: np.ndarray  # (n, T_i)

    @property
    def length(self) -> int:
        return self.inputs.shape[1]


@dataclass
class TrajectoryData:
    X_minus: np.ndarray
    X_plus: np.ndarray
    U_minus: np.ndarray
    lengths: list[int]
    seed: int | None = None

    def __post_init__(self):
        self.X_minus = np.asarray(self.X_minus, dtype=float)
        self.X_plus = np.asarray(self.X_plus, dtype=float)
        self.U_minus = np.asarray(self.U_minus, dtype=float)
        self.lengths = [int(t) for t in self.lengths]
        T = sum(self.lengths)
        for name in ("X_minus", "X_plus", "U_minus"):
            arr = getattr(self, name)
            if arr.ndim != 2 or arr.shape[1] != T:
                raise ValueError(f"{name} has shape {arr.shape}, expected {T} columns")
        if self.X_minus.shape != self.X_plus.shape:
            raise ValueError("X_minus and X_plus shapes differ")
        start = 0
        for t in self.lengths:
            seg = slice(start, start + t)
            if not np.array_equal(self.X_plus[:, seg][:, :-1], self.X_minus[:, seg][:, 1:]):
                raise ValueError("X_plus is not the shifted X_minus within a trajectory")
            start += t

    @property
    def n(self) -> int:
        return self.X_minus.shape[0]

    @property
    def m(self) -> int:
        return self.U_minus.shape[0]

    @property
    def T(self) -> int:
        return self.X_minus.shape[1]

    @property
    def Z(self) -> np.ndarray:
        """Stacked regressor columns ``[X_-; U_-]``."""
        return np.vstack([self.X_minus, self.U_minus])

    def segments(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per-trajectory (states, inputs) recovered from the data matrices."""
        out = []
        start = 0
        for t in self.lengths:
            seg = slice(start, start + t)
            states = np.hstack([self.X_minus[:, seg], self.X_plus[:, seg][:, -1:]])
            out.append((states, self.U_minus[:, seg].copy()))
            start += t
        return out

    def to_dict(self) -> dict:
        return {
            "X_minus": self.X_minus.tolist(),
            "X_plus": self.X_plus.tolist(),
            "U_minus": self.U_minus.tolist(),
            "lengths": list(self.lengths),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> TrajectoryData:
        return cls(
            _as_matrix(d["X_minus"]),
            _as_matrix(d["X_plus"]),
            _as_matrix(d["U_minus"]),
            d["lengths"],
            d.get("seed"),
        )

    def to_csv(self) -> str:
        """One row per time index: x1..xn, u1..um, segment (u empty on final states)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(self.n)] + [f"u{i + 1}" for i in range(self.m)] + ["segment"])
        for s, (states, inputs) in enumerate(self.segments()):
            for k in range(states.shape[1]):
                u = [repr(float(v)) for v in inputs[:, k]] if k < inputs.shape[1] else [""] * self.m
                w.writerow([repr(float(v)) for v in states[:, k]] + u + [s])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, seed: int | None = None) -> TrajectoryData:
        rows = list(csv.reader(io.StringIO(text)))
        header, rows = rows[0], rows[1:]
        n = sum(1 for h in header if h.startswith("x"))
        m = sum(1 for h in header if h.startswith("u"))
        trajs: dict[int, tuple[list, list]] = {}
        for row in rows:
            seg = int(row[-1])
            xs, us = trajs.setdefault(seg, ([], []))
            xs.append([float(v) for v in row[:n]])
            if row[n] != "" or m == 0:
                us.append([float(v) for v in row[n : n + m]])
        pairs = [
            (np.array(xs).T, np.array(us).reshape(-1, m).T) for _, (xs, us) in sorted(trajs.items())
        ]
        return assemble(pairs, seed=seed)


def _as_matrix(rows) -> np.ndarray:
    a = np.asarray(rows, dtype=float)
    return a if a.ndim == 2 else a.reshape(len(rows), -1)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def build_noise_matrix_zonotope(Z_w: Zonotope, T: int) -> MatrixZonotope:
    """Matrix zonotope of all ``n x T`` matrices whose columns lie in ``Z_w``.

    Generator ``j + i*T`` places noise generator ``i`` in column ``j``.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    n, g = Z_w.dim, Z_w.num_generators
    C = np.tile(Z_w.center.reshape(-1, 1), (1, T))
    gens = np.zeros((g * T, n, T))
    for i in range(g):
        for j in range(T):
            gens[i * T + j, :, j] = Z_w.generators[:, i]
    return MatrixZonotope(C, gens)


def simulate_nonlinear(
    sys: NonlinearSystem | Callable,
    x0,
    inputs: Sequence,
    noise: Zonotope,
    seed=None,
) -> Trajectory:
    """Roll out ``x(k+1) = f(x(k), u(k)) + w(k)`` with ``w(k)`` drawn from ``noise``."""
    rng = _rng(seed)
    x = np.asarray(x0, dtype=float).reshape(-1)
    U = np.asarray(inputs, dtype=float)
    if U.ndim == 1:
        U = U.reshape(-1, 1)
    # inputs given as a sequence of vectors -> columns
    U = U.T
    if noise.dim != x.shape[0]:
        raise ValueError(f"noise has dim {noise.dim}, state has dim {x.shape[0]}")
    states = [x]
    noises = []
    for k in range(U.shape[1]):
        w = sample_point(noise, rng)
        nxt = np.asarray(sys(x, U[:, k]), dtype=float).reshape(-1)
        if nxt.shape != x.shape:
            raise ValueError(f"f returned shape {nxt.shape}, expected {x.shape}")
        x = nxt + w
        states.append(x)
        noises.append(w)
    n = states[0].shape[0]
    return Trajectory(
        np.column_stack(states),
        U.copy(),
        np.column_stack(noises) if noises else np.zeros((n, 0)),
    )


def simulate_linear(sys: LinearSystem, x0, inputs: Sequence, noise: Zonotope, seed=None) -> Trajectory:
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != sys.n:
        raise ValueError(f"x0 has dim {x0.shape[0]}, system has n = {sys.n}")
    U = np.asarray(inputs, dtype=float).reshape(len(inputs), -1) if len(inputs) else np.zeros((0, sys.m))
    if U.shape[1] != sys.m:
        raise ValueError(f"inputs have dim {U.shape[1]}, system has m = {sys.m}")
    return simulate_nonlinear(sys, x0, U, noise, seed)


def assemble(trajectories: Sequence, seed: int | None = None) -> TrajectoryData:
    """Stack trajectories into ``X_-``, ``X_+``, ``U_-``.

    Each item is a :class:`Trajectory` or a ``(states, inputs)`` pair with
    states of shape (n, T_i + 1) and inputs of shape (m, T_i).
    """
    if not trajectories:
        raise ValueError("need at least one trajectory")
    xm, xp, um, lengths = [], [], [], []
    for tr in trajectories:
        states, inputs = (tr.states, tr.inputs) if isinstance(tr, Trajectory) else tr
        states = np.asarray(states, dtype=float)
        inputs = np.asarray(inputs, dtype=float)
        if inputs.ndim == 1:
            inputs = inputs.reshape(1, -1)
        if states.shape[1] < 2:
            raise ValueError("each trajectory needs at least two states")
        if inputs.shape[1] != states.shape[1] - 1:
            raise ValueError(
                f"trajectory has {states.shape[1]} states but {inputs.shape[1]} inputs"
            )
        xm.append(states[:, :-1])
        xp.append(states[:, 1:])
        um.append(inputs)
        lengths.append(inputs.shape[1])
    return TrajectoryData(np.hstack(xm), np.hstack(xp), np.hstack(um), lengths, seed)


def generate_dataset(
    sys,
    initial_set: Zonotope,
    input_set: Zonotope | Sequence[Zonotope],
    noise: Zonotope,
    lengths: Sequence[int],
    seed=None,
) -> TrajectoryData:
    """Sample ``len(lengths)`` trajectories from random initial states and inputs."""
    rng = _rng(seed)
    trajs = []
    for T_i in lengths:
        x0 = sample_point(initial_set, rng)
        if isinstance(input_set, Zonotope):
            us = [sample_point(input_set, rng) for _ in range(T_i)]
        else:
            us = [sample_point(input_set[min(k, len(input_set) - 1)], rng) for k in range(T_i)]
        trajs.append(simulate_nonlinear(sys, x0, np.array(us).reshape(T_i, -1), noise, rng))
    return assemble(trajs, seed=seed if isinstance(seed, int) else None)


def right_inverse(M, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose right-inverse ``H`` with ``M H = I`` for full-row-rank ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    p, T = M.shape
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    if p > T or rank < p:
        raise InsufficientExcitationError(rank, p)
    return (Vt.T / s) @ U.T


@dataclass
class RankReport:
    shape: tuple[int, int]
    singular_values: list[float]
    rank: int
    required: int
    ok: bool
    mode: str = "linear"
    z_star: list[float] | None = field(default=None)

    def to_dict(self) -> dict:
        return {
            "shape": list(self.shape),
            "singular_values": self.singular_values,
            "rank": self.rank,
            "required": self.required,
            "ok": self.ok,
            "mode": self.mode,
            "z_star": self.z_star,
        }


def regressor_matrix(data: TrajectoryData, z_star=None) -> np.ndarray:
    """``[X_-; U_-]``, or ``[1; X_- - x*; U_- - u*]`` when a linearization point is given."""
    if z_star is None:
        return data.Z
    z = np.asarray(z_star, dtype=float).reshape(-1, 1)
    if z.shape[0] != data.n + data.m:
        raise ValueError(f"linearization point has dim {z.shape[0]}, expected {data.n + data.m}")
    return np.vstack([np.ones((1, data.T)), data.Z - z])


def rank_report(data: TrajectoryData, z_star=None, rank_tol: float = DEFAULT_RANK_TOL) -> RankReport:
    M = regressor_matrix(data, z_star)
    s = np.linalg.svd(M, compute_uv=False)
    rank = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    required = M.shape[0]
    return RankReport(
        shape=M.shape,
        singular_values=s.tolist(),
        rank=rank,
        required=required,
        ok=rank == required and required <= M.shape[1],
        mode="linear" if z_star is None else "nonlinear",
        z_star=None if z_star is None else np.asarray(z_star, dtype=float).tolist(),
    )
