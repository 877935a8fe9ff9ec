from __future__ import annotations

import math
from pathlib import Path

import pytest

from telewalk.lip import LipParams

REPO_ROOT = Path(__file__).resolve().parents[1]
SCENARIO_DIR = REPO_ROOT / "scenarios"


@pytest.fixture(scope="session")
def human() -> LipParams:
    return LipParams(mass=75.0, com_height=1.20)


@pytest.fixture(scope="session")
def robot() -> LipParams:
    return LipParams(mass=20.2, com_height=0.55)


def rk4_free(x: float, v: float, omega_sq: float, dt: float, steps: int,
             cop: float = 0.0, accel_ext: float = 0.0) -> tuple[float, float]:
    """Independent fixed-step integrator used as an oracle in several tests.

    Deliberately written here rather than imported from the package so the
    oracle stays independent of the code path it checks.
    """
    for _ in range(steps):
        def acc(xx: float) -> float:
            return omega_sq * (xx - cop) + accel_ext

        a1 = acc(x)
        x2, v2 = x + 0.5 * dt * v, v + 0.5 * dt * a1
        a2 = acc(x2)
        x3, v3 = x + 0.5 * dt * v2, v + 0.5 * dt * a2
        a3 = acc(x3)
        x4, v4 = x + dt * v3, v + dt * a3
        a4 = acc(x4)
        x = x + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return x, v


def coth_ref(z: float) -> float:
    return math.cosh(z) / math.sinh(z)
