"""Offline handwritten character recognition with zonal line-count features.

Pipeline: gray image -> :func:`raster.preprocess` -> :func:`segment.segment_page`
-> :func:`features.extract_features` -> :mod:`mlp` network.
"""

from ._backend import BACKEND
from .features import AveragingMode, FeatureVector, Orientation, extract_features
from .mlp import NetworkConfig, NetworkParams, TrainConfig, TrainState
from .raster import preprocess
from .segment import GlyphBox, segment_page

__all__ = [
    "BACKEND", "AveragingMode", "FeatureVector", "Orientation", "extract_features",
    "NetworkConfig", "NetworkParams", "TrainConfig", "TrainState", "preprocess",
    "GlyphBox", "segment_page",
]
__version__ = "0.1.0"
