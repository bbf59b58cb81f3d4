"""Simulation and optimization toolkit for online allocation of reusable
resources: an adaptive multiplicative-weights policy with phase doubling,
steady-state and horizon-expanded LP benchmarks (with duals and column
generation), an MNL assortment application layer, exact small-instance
oracles, and a seeded experiment harness.
"""

from .model import (
    Bounds, Instance, Outcome, TableOutcomeModel, build_instance,
    compute_bounds, episode_streams, load_instance,
)
from .simulator import OccupancyLedger, Trajectory, run_episode
from .policy import ImwuPolicy, OsaPolicy, PhaseSchedule, error_params
from .metrics import compute_metrics

__all__ = [
    "Bounds", "Instance", "Outcome", "TableOutcomeModel", "build_instance",
    "compute_bounds", "episode_streams", "load_instance",
    "OccupancyLedger", "Trajectory", "run_episode",
    "ImwuPolicy", "OsaPolicy", "PhaseSchedule", "error_params",
    "compute_metrics",
]

__version__ = "0.1.0"
