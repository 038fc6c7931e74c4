"""Configuration, synthetic data, dataset files, experiment runs and the CLI."""
from .config import ConfigError, ExperimentConfig, load_config, resolve, shipped_config
from .generate import GeneratorSpec, RoutedSpec, bayes_accuracy, gen_data, gen_routed, hard_region, two_blob
from .io import canonical_dumps, load_csv, save_csv
from .runner import run, run_config

__all__ = [
    "ConfigError", "ExperimentConfig", "GeneratorSpec", "RoutedSpec", "bayes_accuracy", "canonical_dumps",
    "gen_data", "gen_routed", "hard_region", "load_config", "load_csv", "resolve", "run", "run_config",
    "save_csv", "shipped_config", "two_blob",
]
