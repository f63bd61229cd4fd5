import itertools

import numpy as np
import pytest

from zonoreach.sets import Zonotope

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, title: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_zonotope(rng, n, p, scale=1.0):
    return Zonotope(rng.normal(size=n), scale * rng.normal(size=(n, p)))


def sign_vertices(Z: Zonotope) -> np.ndarray:
    """All points c + G s for s in {-1, 1}^p (brute force)."""
    p = Z.num_generators
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=p))).reshape(-1, p)
    return Z.center + signs @ Z.generators.T
