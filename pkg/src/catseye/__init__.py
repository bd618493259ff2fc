"""Spectral and quadratic-form stability toolkit for Kelvin-Stuart cat's eyes."""

from .errors import CatseyeError
from .report import VERSION as __version__
from .steady_fields import CoordsEGX, FlowParams, PointXY

__all__ = ["CatseyeError", "CoordsEGX", "FlowParams", "PointXY", "__version__"]
