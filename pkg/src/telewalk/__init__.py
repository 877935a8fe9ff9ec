"""Pilot-synchronized bipedal walking simulator.

A deterministic 1 kHz simulation in which a pilot's stepping generates a
virtual walking reference that a reduced-order bipedal robot tracks through
bilateral force coupling and a similarity-preserving step placement law.
"""

__version__ = "0.1.0"

from .config import ScenarioConfig, load_scenario
from .engine import RunResult, RunSummary, Simulation, compute_metrics, run_scenario
from .lip import LipParams, PlanarState

__all__ = [
    "__version__",
    "ScenarioConfig",
    "load_scenario",
    "RunResult",
    "RunSummary",
    "Simulation",
    "compute_metrics",
    "run_scenario",
    "LipParams",
    "PlanarState",
]
