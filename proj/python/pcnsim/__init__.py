"""Payment channel network routing, transaction coalitions and waiting times."""

from ._pcnsim import (
    Error,
    Scenario,
    cheapest_path,
    cli,
    expected_wait,
    mc_wait_cdf,
    process,
    ptp,
    shapley,
    sweep,
    wait_cdf,
    worth,
)

__all__ = [
    "Error",
    "Scenario",
    "cheapest_path",
    "cli",
    "expected_wait",
    "mc_wait_cdf",
    "process",
    "ptp",
    "shapley",
    "sweep",
    "wait_cdf",
    "worth",
]
