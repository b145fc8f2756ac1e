from .config import ConfigError, ExperimentConfig, load_config
from .runner import RunOutcome, run

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "RunOutcome", "run"]
