"""Exception types shared across the simulator.

Exit-code mapping used by the CLI: ConfigError -> 2, SimulationError -> 3.
"""


class ConfigError(ValueError):
    """Invalid scenario/PHY/traffic configuration, detected before a run starts."""


class SimulationError(RuntimeError):
    """Internal invariant violated mid-run; indicates a simulator bug."""


class EmptyReportError(ValueError):
    """A percentile or verdict was requested over an empty sample set."""
