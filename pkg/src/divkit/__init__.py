"""Defence-in-depth experiments for ML-based channels."""
from .data import DataError, Demand, LabeledDataset, ScoreRange, SplitSpec, split_dataset
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DataError",
    "Demand",
    "LabeledDataset",
    "ScoreRange",
    "SplitSpec",
    "split_dataset",
    "__version__",
]
