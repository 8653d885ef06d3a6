"""Experiment harness: generators, exhaustive search, property suites."""

from .experiment import ExperimentConfig, load_config, run_experiment
from .generators import generate
from .search import min_partition_order
from .suites import SUITES, verify_suite
from .tower import tower

__all__ = [
    "ExperimentConfig",
    "SUITES",
    "generate",
    "load_config",
    "min_partition_order",
    "run_experiment",
    "tower",
    "verify_suite",
]
