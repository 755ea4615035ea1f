"""Misinformation detection for code-mixed Luganda-English social media posts."""

from .accel import backend
from .corpus import Document, LabeledDataset, compute_stats, load_dataset
from .featurize import NGramConfig, build_vocabulary, vectorize, vectorize_all
from .preprocess import CleaningConfig, clean_text

__version__ = "0.1.0"

__all__ = [
    "backend", "Document", "LabeledDataset", "compute_stats", "load_dataset", "NGramConfig",
    "build_vocabulary", "vectorize", "vectorize_all", "CleaningConfig", "clean_text", "__version__",
]
