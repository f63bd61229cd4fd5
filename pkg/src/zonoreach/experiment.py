"""End-to-end experiments: data generation, reachability, verification."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import ExperimentConfig, parse_config
from .data import (
    InsufficientExcitationError,
    LinearSystem,
    TrajectoryData,
    build_noise_matrix_zonotope,
    generate_dataset,
    rank_report,
)
from .linear_reach import (
    InclusionReport,
    ReachSequence,
    consistent_model_set,
    inclusion_check,
    model_based_reach,
    propagate_linear,
)
from .nonlinear_reach import LipschitzInfo, propagate_nonlinear
from .sets import DEFAULT_CONTAINS_TOL, Zonotope, contains_point, sample_point

log = logging.getLogger(__name__)

MAX_COUNTEREXAMPLES = 20
MAX_KEPT_SAMPLES = 100


@dataclass
class ContainmentTally:
    trials: int
    passes: int
    failures: list[dict] = field(default_factory=list)
    samples: list[list[list[float]]] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return self.trials - self.passes

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "passes": self.passes,
            "failures": self.failures,
            "samples": self.samples,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ContainmentTally:
        return cls(d["trials"], d["passes"], list(d.get("failures", [])), list(d.get("samples", [])))


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    data: TrajectoryData
    rank: dict
    data_driven: ReachSequence
    model_based: ReachSequence | None
    inclusion: InclusionReport | None
    containment: ContainmentTally
    version: str = __version__
    # wall-clock seconds per phase; kept out of the serialized report so that
    # repeated runs produce identical bytes
    timings: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "config": self.config.to_dict(),
            "data": self.data.to_dict(),
            "rank": self.rank,
            "sequences": {
                "data_driven": self.data_driven.to_dict(),
                "model_based": None if self.model_based is None else self.model_based.to_dict(),
            },
            "inclusion": None if self.inclusion is None else self.inclusion.to_dict(),
            "containment": self.containment.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentReport:
        seqs = d["sequences"]
        return cls(
            config=parse_config(d["config"]),
            data=TrajectoryData.from_dict(d["data"]),
            rank=d["rank"],
            data_driven=ReachSequence.from_dict(seqs["data_driven"]),
            model_based=None if seqs.get("model_based") is None else ReachSequence.from_dict(seqs["model_based"]),
            inclusion=None if d.get("inclusion") is None else InclusionReport.from_dict(d["inclusion"]),
            containment=ContainmentTally.from_dict(d["containment"]),
            version=d.get("version", __version__),
        )


def _seed_streams(seed: int) -> tuple[np.random.SeedSequence, ...]:
    """Independent streams for data, directions and Monte Carlo trials."""
    return tuple(np.random.SeedSequence(seed).spawn(3))


def _simulate_trial(sys, X0: Zonotope, Us: list[Zonotope], Z_w: Zonotope, ss) -> np.ndarray:
    rng = np.random.default_rng(ss)
    x = sample_point(X0, rng)
    states = [x]
    for Uk in Us:
        x = np.asarray(sys(x, sample_point(Uk, rng)), dtype=float) + sample_point(Z_w, rng)
        states.append(x)
    return np.array(states)


def _check_trial(args) -> tuple[int, np.ndarray, list[int]]:
    i, sys, X0, Us, Z_w, sets, ss, tol = args
    states = _simulate_trial(sys, X0, Us, Z_w, ss)
    bad = [k for k, (Z, x) in enumerate(zip(sets, states)) if not contains_point(Z, x, tol)]
    return i, states, bad


def verify_containment(
    seq: ReachSequence,
    config: ExperimentConfig,
    trials: int | None = None,
    seed=None,
    workers: int | None = None,
    tol: float = DEFAULT_CONTAINS_TOL,
) -> ContainmentTally:
    """Simulate fresh true-system trajectories and test membership at every step."""
    trials = config.verification.trials if trials is None else trials
    workers = config.verification.workers if workers is None else workers
    if seed is None:
        seed = _seed_streams(config.seed)[2]
    elif not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    sys = config.true_system()
    Us = config.input_sets()[: seq.horizon]
    jobs = [
        (i, sys, config.initial_set, Us, config.noise, seq.sets, ss, tol)
        for i, ss in enumerate(seed.spawn(trials))
    ]
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_check_trial, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        results = [_check_trial(j) for j in jobs]

    passes = 0
    failures = []
    samples = [[] for _ in seq.sets]
    for i, states, bad in sorted(results, key=lambda r: r[0]):
        if not bad:
            passes += 1
        for k in bad:
            if len(failures) < MAX_COUNTEREXAMPLES:
                failures.append({"trial": i, "k": k, "state": states[k].tolist()})
        if i < MAX_KEPT_SAMPLES:
            for k, x in enumerate(states):
                samples[k].append(x.tolist())
    return ContainmentTally(trials, passes, failures, samples)


def _lipschitz_arg(config: ExperimentConfig):
    spec = config.lipschitz
    if spec.mode == "given":
        return LipschitzInfo(spec.L_star, spec.delta, "user-supplied")
    return spec.mode


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Generate data, compute reachable sets, and verify them.

    Raises :class:`InsufficientExcitationError` when the collected data fails
    the rank condition.
    """
    timings = {}
    data_ss, dir_ss, mc_ss = _seed_streams(config.seed)
    sys = config.true_system()

    t0 = time.perf_counter()
    plan = config.data
    data_X0 = config.initial_set if plan.initial_set is None else plan.initial_set
    data_U = config.input_set if plan.input_set is None else plan.input_set
    data = generate_dataset(
        sys,
        data_X0,
        data_U,
        config.noise,
        plan.lengths,
        np.random.default_rng(data_ss),
    )
    data.seed = config.seed
    timings["data"] = time.perf_counter() - t0

    z_star = None
    if config.mode == "nonlinear":
        U0 = config.input_set if isinstance(config.input_set, Zonotope) else config.input_set[0]
        z_star = np.concatenate([config.initial_set.center, U0.center])
    rank = rank_report(data, z_star)
    if not rank.ok:
        raise InsufficientExcitationError(rank.rank, rank.required)

    t0 = time.perf_counter()
    M_w = build_noise_matrix_zonotope(config.noise, data.T)
    Us = config.input_sets()
    model_based = inclusion = None
    if config.mode == "linear":
        M_Sigma = consistent_model_set(data, M_w)
        dd = propagate_linear(M_Sigma, config.initial_set, Us, config.noise, config.horizon, config.max_order)
        if isinstance(sys, LinearSystem):
            model_based = model_based_reach(sys, config.initial_set, Us, config.noise, config.horizon, config.max_order)
    else:
        dd = propagate_nonlinear(
            data, config.initial_set, Us, config.noise, config.horizon,
            _lipschitz_arg(config), config.max_order, M_w,
        )
    timings["reach"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if model_based is not None:
        inclusion = inclusion_check(
            model_based, dd, config.verification.directions, np.random.default_rng(dir_ss)
        )
    tally = verify_containment(dd, config, seed=mc_ss)
    timings["verify"] = time.perf_counter() - t0
    log.info("timings: %s", {k: round(v, 3) for k, v in timings.items()})
    if tally.violations:
        log.warning("%d of %d trials left the reachable sets", tally.violations, tally.trials)

    return ExperimentReport(
        config=config,
        data=data,
        rank=rank.to_dict(),
        data_driven=dd,
        model_based=model_based,
        inclusion=inclusion,
        containment=tally,
        timings=timings,
    )
