"""Python access to the HODM simulator core."""

from ._core import (
    ValidationError,
    block_channel,
    default_config_text,
    demodulate,
    experiment_csv,
    experiment_names,
    los_block_gain,
    modulate,
    normalize_config,
    run_experiment,
    waterfill,
)

__all__ = [
    "ValidationError",
    "block_channel",
    "default_config_text",
    "demodulate",
    "experiment_csv",
    "experiment_names",
    "los_block_gain",
    "modulate",
    "normalize_config",
    "run_experiment",
    "waterfill",
]
