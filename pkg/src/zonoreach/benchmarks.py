"""Benchmark systems and their reference set parameters."""

from __future__ import annotations

import numpy as np

from .data import LinearSystem, NonlinearSystem

# Five-dimensional system (sampling time 0.05 s).
A_5D = np.array(
    [
        [0.9323, -0.1890, 0.0, 0.0, 0.0],
        [0.1890, 0.9323, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.8596, 0.0430, 0.0],
        [0.0, 0.0, -0.0430, 0.8596, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.9048],
    ]
)
B_5D = np.array([[0.0436], [0.0533], [0.0475], [0.0453], [0.0476]])


def linear5d() -> LinearSystem:
    return LinearSystem(A_5D, B_5D)


# Exothermic CSTR with a first-order irreversible reaction A -> B, written in
# deviations from the steady state (C_A, T) = (0.5 mol/L, 350 K) reached at
# nominal flow and coolant temperature 300 K.
#   state  x = [C_A - 0.5, T - 350]
#   input  u = [q / q_nominal, T_c - 300]
CSTR_PARAMS = {
    "q_nominal": 100.0,  # L/min
    "V": 100.0,  # L
    "C_Af": 1.0,  # mol/L
    "T_f": 350.0,  # K
    "rho": 1000.0,  # g/L
    "C_p": 0.239,  # J/(g K)
    "dH": -5.0e4,  # J/mol
    "E_over_R": 8750.0,  # K
    "k0": 7.2e10,  # 1/min
    "UA": 5.0e4,  # J/(min K)
    "C_As": 0.5,
    "T_s": 350.0,
    "T_cs": 300.0,
    "h": 0.05,  # Euler step, min
}


def cstr_step(x, u, p: dict = CSTR_PARAMS) -> np.ndarray:
    """One explicit-Euler step of the reactor in deviation coordinates."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    C_A = x[0] + p["C_As"]
    T = x[1] + p["T_s"]
    q = u[0] * p["q_nominal"]
    T_c = u[1] + p["T_cs"]
    rate = p["k0"] * np.exp(-p["E_over_R"] / T) * C_A
    dC = q / p["V"] * (p["C_Af"] - C_A) - rate
    dT = (
        q / p["V"] * (p["T_f"] - T)
        - p["dH"] / (p["rho"] * p["C_p"]) * rate
        + p["UA"] / (p["V"] * p["rho"] * p["C_p"]) * (T_c - T)
    )
    return x + p["h"] * np.array([dC, dT])


def cstr() -> NonlinearSystem:
    return NonlinearSystem(cstr_step, n=2, m=2, name="cstr")


NONLINEAR_BENCHMARKS = {"cstr": cstr}


def nonlinear_benchmark(name: str) -> NonlinearSystem:
    try:
        return NONLINEAR_BENCHMARKS[name]()
    except KeyError:
        raise ValueError(
            f"unknown benchmark {name!r}; available: {sorted(NONLINEAR_BENCHMARKS)}"
        ) from None
