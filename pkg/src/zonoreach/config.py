"""Experiment configuration: a single JSON document with matrices inline.

Layout (all keys except ``system``, ``initial_set``, ``input_set``, ``noise``
and ``horizon`` optional)::

    {
      "name": "linear5d",
      "mode": "linear" | "nonlinear",
      "system": {"type": "linear", "A": [[...]], "B": [[...]]}
                | {"type": "benchmark", "name": "cstr"},
      "initial_set": {"center": [...], "generators": [[...]]},
      "input_set": <zonotope> | [<zonotope>, ...],       # one per step
      "noise": <zonotope>,
      "horizon": 5,
      "data": {"lengths": [5, 5, ...]}  or  {"trajectories": 13, "length": 5},
              optional "initial_set" / "input_set" overrides for data collection,
      "seed": 0,
      "lipschitz": {"mode": "neglect" | "estimate" | "given", "L_star": .., "delta": ..},
      "max_order": 20,
      "verification": {"trials": 1000, "directions": 100, "workers": 1},
      "plot_dims": [[0, 1]]
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .benchmarks import A_5D, B_5D, NONLINEAR_BENCHMARKS, nonlinear_benchmark
from .data import LinearSystem, NonlinearSystem
from .sets import DEFAULT_MAX_ORDER, Zonotope


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class SystemSpec:
    type: str
    A: list | None = None
    B: list | None = None
    name: str | None = None

    def build(self) -> LinearSystem | NonlinearSystem:
        if self.type == "linear":
            return LinearSystem(np.array(self.A, dtype=float), np.array(self.B, dtype=float))
        return nonlinear_benchmark(self.name)

    def to_dict(self) -> dict:
        if self.type == "linear":
            return {"type": "linear", "A": self.A, "B": self.B}
        return {"type": "benchmark", "name": self.name}


@dataclass
class DataPlan:
    lengths: list[int]
    initial_set: Zonotope | None = None
    input_set: Zonotope | None = None

    def to_dict(self) -> dict:
        d: dict = {"lengths": list(self.lengths)}
        if self.initial_set is not None:
            d["initial_set"] = self.initial_set.to_dict()
        if self.input_set is not None:
            d["input_set"] = self.input_set.to_dict()
        return d


@dataclass
class LipschitzSpec:
    mode: str = "neglect"
    L_star: float | None = None
    delta: float | None = None

    def to_dict(self) -> dict:
        d: dict = {"mode": self.mode}
        if self.mode == "given":
            d.update(L_star=self.L_star, delta=self.delta)
        return d


@dataclass
class VerificationSpec:
    trials: int = 1000
    directions: int = 100
    workers: int = 1

    def to_dict(self) -> dict:
        return {"trials": self.trials, "directions": self.directions, "workers": self.workers}


@dataclass
class ExperimentConfig:
    system: SystemSpec
    initial_set: Zonotope
    input_set: Zonotope | list[Zonotope]
    noise: Zonotope
    horizon: int
    data: DataPlan
    mode: str = "linear"
    name: str = "experiment"
    seed: int = 0
    lipschitz: LipschitzSpec = field(default_factory=LipschitzSpec)
    max_order: float = DEFAULT_MAX_ORDER
    verification: VerificationSpec = field(default_factory=VerificationSpec)
    plot_dims: list[tuple[int, int]] = field(default_factory=lambda: [(0, 1)])

    @property
    def n(self) -> int:
        return self.initial_set.dim

    def input_sets(self) -> list[Zonotope]:
        if isinstance(self.input_set, Zonotope):
            return [self.input_set] * self.horizon
        return list(self.input_set[: self.horizon])

    def true_system(self):
        return self.system.build()

    def to_dict(self) -> dict:
        U = (
            self.input_set.to_dict()
            if isinstance(self.input_set, Zonotope)
            else [Z.to_dict() for Z in self.input_set]
        )
        return {
            "name": self.name,
            "mode": self.mode,
            "system": self.system.to_dict(),
            "initial_set": self.initial_set.to_dict(),
            "input_set": U,
            "noise": self.noise.to_dict(),
            "horizon": self.horizon,
            "data": self.data.to_dict(),
            "seed": self.seed,
            "lipschitz": self.lipschitz.to_dict(),
            "max_order": self.max_order,
            "verification": self.verification.to_dict(),
            "plot_dims": [list(p) for p in self.plot_dims],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        return parse_config(d)

    def with_overrides(self, **kw) -> ExperimentConfig:
        return replace(self, **kw)


# ---------------------------------------------------------------------------
# parsing with field paths in error messages


def _require(d: dict, key: str, path: str):
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object")
    if key not in d:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return d[key]


def _matrix(value, path: str) -> list:
    try:
        a = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(path, "expected a numeric matrix") from None
    if a.ndim != 2:
        raise ConfigError(path, f"expected a matrix, got array of dim {a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ConfigError(path, "entries must be finite")
    return a.tolist()


def _zonotope(value, path: str) -> Zonotope:
    if not isinstance(value, dict):
        raise ConfigError(path, "expected a zonotope object {center, generators}")
    try:
        c = np.array(_require(value, "center", path), dtype=float)
        G = np.array(value.get("generators", []), dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(path, "center/generators must be numeric") from None
    if c.ndim != 1:
        raise ConfigError(f"{path}.center", "expected a vector")
    if G.size == 0:
        G = np.zeros((c.shape[0], 0))
    if G.ndim != 2 or G.shape[0] != c.shape[0]:
        raise ConfigError(
            f"{path}.generators", f"expected {c.shape[0]} rows, got shape {G.shape}"
        )
    try:
        return Zonotope(c, G)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def _int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    return value


def parse_config(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("<root>", "expected a JSON object")
    mode = d.get("mode", "linear")
    if mode not in ("linear", "nonlinear"):
        raise ConfigError("mode", f"expected 'linear' or 'nonlinear', got {mode!r}")

    sd = _require(d, "system", "")
    stype = _require(sd, "type", "system")
    if stype == "linear":
        system = SystemSpec(
            "linear", A=_matrix(_require(sd, "A", "system"), "system.A"),
            B=_matrix(_require(sd, "B", "system"), "system.B"),
        )
        n = len(system.A)
        if any(len(r) != n for r in system.A):
            raise ConfigError("system.A", "must be square")
        if len(system.B) != n:
            raise ConfigError("system.B", f"expected {n} rows")
        m = len(system.B[0])
    elif stype == "benchmark":
        name = _require(sd, "name", "system")
        if name not in NONLINEAR_BENCHMARKS:
            raise ConfigError("system.name", f"unknown benchmark {name!r}")
        system = SystemSpec("benchmark", name=name)
        bench = nonlinear_benchmark(name)
        n, m = bench.n, bench.m
    else:
        raise ConfigError("system.type", f"expected 'linear' or 'benchmark', got {stype!r}")

    X0 = _zonotope(_require(d, "initial_set", ""), "initial_set")
    if X0.dim != n:
        raise ConfigError("initial_set.center", f"expected dim {n}, got {X0.dim}")
    U_raw = _require(d, "input_set", "")
    if isinstance(U_raw, list):
        U = [_zonotope(u, f"input_set[{i}]") for i, u in enumerate(U_raw)]
        dims = {Z.dim for Z in U}
    else:
        U = _zonotope(U_raw, "input_set")
        dims = {U.dim}
    if dims != {m}:
        raise ConfigError("input_set", f"expected input dim {m}, got {sorted(dims)}")
    W = _zonotope(_require(d, "noise", ""), "noise")
    if W.dim != n:
        raise ConfigError("noise.center", f"expected dim {n}, got {W.dim}")
    N = _int(_require(d, "horizon", ""), "horizon", 0)
    if isinstance(U, list) and len(U) < N:
        raise ConfigError("input_set", f"need {N} per-step input sets, got {len(U)}")

    dd = d.get("data", {"trajectories": 1, "length": max(n + m, 1) * 4})
    if not isinstance(dd, dict):
        raise ConfigError("data", "expected an object")
    if "lengths" in dd:
        if not isinstance(dd["lengths"], list) or not dd["lengths"]:
            raise ConfigError("data.lengths", "expected a non-empty list")
        lengths = [_int(t, f"data.lengths[{i}]", 1) for i, t in enumerate(dd["lengths"])]
    else:
        K = _int(_require(dd, "trajectories", "data"), "data.trajectories", 1)
        L = _int(_require(dd, "length", "data"), "data.length", 1)
        lengths = [L] * K
    plan = DataPlan(
        lengths,
        _zonotope(dd["initial_set"], "data.initial_set") if "initial_set" in dd else None,
        _zonotope(dd["input_set"], "data.input_set") if "input_set" in dd else None,
    )
    if plan.initial_set is not None and plan.initial_set.dim != n:
        raise ConfigError("data.initial_set", f"expected dim {n}")
    if plan.input_set is not None and plan.input_set.dim != m:
        raise ConfigError("data.input_set", f"expected dim {m}")

    ld = d.get("lipschitz", {"mode": "neglect"})
    lmode = ld.get("mode", "neglect") if isinstance(ld, dict) else None
    if lmode not in ("neglect", "estimate", "given"):
        raise ConfigError("lipschitz.mode", f"expected neglect|estimate|given, got {lmode!r}")
    lip = LipschitzSpec(lmode)
    if lmode == "given":
        for key in ("L_star", "delta"):
            v = _require(ld, key, "lipschitz")
            if not isinstance(v, (int, float)) or isinstance(v, bool) or v < 0:
                raise ConfigError(f"lipschitz.{key}", "expected a non-negative number")
        lip = LipschitzSpec("given", float(ld["L_star"]), float(ld["delta"]))

    max_order = d.get("max_order", DEFAULT_MAX_ORDER)
    if not isinstance(max_order, (int, float)) or isinstance(max_order, bool) or max_order < 1:
        raise ConfigError("max_order", "expected a number >= 1")

    vd = d.get("verification", {})
    if not isinstance(vd, dict):
        raise ConfigError("verification", "expected an object")
    ver = VerificationSpec(
        _int(vd.get("trials", 1000), "verification.trials", 0),
        _int(vd.get("directions", 100), "verification.directions", 1),
        _int(vd.get("workers", 1), "verification.workers", 1),
    )

    dims = []
    for i, p in enumerate(d.get("plot_dims", [[0, 1]] if n >= 2 else [])):
        if not (isinstance(p, list) and len(p) == 2):
            raise ConfigError(f"plot_dims[{i}]", "expected an index pair")
        a, b = (_int(v, f"plot_dims[{i}]", 0) for v in p)
        if a == b or a >= n or b >= n:
            raise ConfigError(f"plot_dims[{i}]", f"invalid pair for dimension {n}")
        dims.append((a, b))

    return ExperimentConfig(
        system=system,
        initial_set=X0,
        input_set=U,
        noise=W,
        horizon=N,
        data=plan,
        mode=mode,
        name=str(d.get("name", "experiment")),
        seed=_int(d.get("seed", 0), "seed", 0),
        lipschitz=lip,
        max_order=float(max_order),
        verification=ver,
        plot_dims=dims,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from None
    return parse_config(d)


# ---------------------------------------------------------------------------
# built-in experiments


def linear5d_config(seed: int = 0, trials: int = 1000) -> ExperimentConfig:
    n = 5
    return ExperimentConfig(
        name="linear5d",
        mode="linear",
        system=SystemSpec("linear", A=A_5D.tolist(), B=B_5D.tolist()),
        initial_set=Zonotope(np.ones(n), 0.1 * np.eye(n)),
        input_set=Zonotope([10.0], [[0.25]]),
        noise=Zonotope(np.zeros(n), 0.005 * np.ones((n, 1))),
        horizon=5,
        data=DataPlan([5] * 13),
        seed=seed,
        verification=VerificationSpec(trials=trials),
        # projection pairs are an arbitrary choice covering every state once
        plot_dims=[(0, 1), (2, 3), (4, 0)],
    )


def cstr_config(seed: int = 0, trials: int = 500) -> ExperimentConfig:
    return ExperimentConfig(
        name="cstr",
        mode="nonlinear",
        system=SystemSpec("benchmark", name="cstr"),
        initial_set=Zonotope([0.015, -45.0], np.diag([0.005, 3.0])),
        input_set=Zonotope([1.0, 1.0], np.diag([0.1, 2.0])),
        noise=Zonotope([0.0, 0.0], [[0.01], [0.01]]),
        horizon=5,
        data=DataPlan([5] * 40),
        seed=seed,
        lipschitz=LipschitzSpec("neglect"),
        verification=VerificationSpec(trials=trials),
        plot_dims=[(0, 1)],
    )


BUILTIN_CONFIGS = {"linear5d": linear5d_config, "cstr": cstr_config}
