"""Configuration, presets, execution, sweeps and the command-line interface."""

from .config import ConfigError, ScenarioConfig, from_dict, from_preset, parse_config, set_path
from .presets import DESCRIPTIONS, PRESETS
from .run import OutputBundle, ScenarioError, SweepResult, run_scenario, sweep

__all__ = [
    "ConfigError", "ScenarioConfig", "from_dict", "from_preset", "parse_config", "set_path",
    "PRESETS", "DESCRIPTIONS", "OutputBundle", "ScenarioError", "SweepResult",
    "run_scenario", "sweep",
]
