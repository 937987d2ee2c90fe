"""Experiment configuration, presets and the command-line driver."""

from .cli import ExperimentSummary, cmd_audit, cmd_compare, cmd_path, cmd_solve, main, run_experiment
from .config import ConfigError, ExperimentConfig, load_config, load_preset, parse_config, preset_names

__all__ = [
    "ConfigError", "ExperimentConfig", "ExperimentSummary", "cmd_audit", "cmd_compare", "cmd_path",
    "cmd_solve", "load_config", "load_preset", "main", "parse_config", "preset_names", "run_experiment",
]
