"""Simulation of W-state transfer between cavity arrays through a shared coupler qutrit."""

from ._cavityw import (
    ConfigError,
    Error,
    NumericError,
    System,
    TransferRecord,
    __version__,
    load_config,
    oracle,
    run_cli,
    sweep,
    transfer,
)

__all__ = [
    "ConfigError",
    "Error",
    "NumericError",
    "System",
    "TransferRecord",
    "__version__",
    "load_config",
    "oracle",
    "run_cli",
    "sweep",
    "transfer",
]
