"""Discrete-event simulator of VR streaming over single- and multi-link Wi-Fi."""

from .engine import (
    EnsembleResult,
    ScenarioConfig,
    SimResult,
    load_scenario,
    run_ensemble,
    run_scenario,
)
from .errors import ConfigError, EmptyReportError, SimulationError
from .metrics import DelayReport, WfaVerdict, percentile, wfa_verdict
from .phy import LinkConfig

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DelayReport",
    "EmptyReportError",
    "EnsembleResult",
    "LinkConfig",
    "ScenarioConfig",
    "SimResult",
    "SimulationError",
    "WfaVerdict",
    "__version__",
    "load_scenario",
    "percentile",
    "run_ensemble",
    "run_scenario",
    "wfa_verdict",
]
