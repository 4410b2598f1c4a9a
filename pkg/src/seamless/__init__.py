"""Color-contrast (seamlessness) analysis of digitized paintings."""

from .colorspace import LabColor, Srgb8, delta_e, load_lab, load_srgb, srgb_to_lab, srgb_to_lab_array
from .contrast import DistanceStats, adjacent_distances, analyze_image, seamlessness
from .nullmodels import NullModelKind, null_distribution, shuffle_pixels, uniform_rgb
from .robustness import (
    apply_temperature,
    blackbody_rgb,
    resize_bicubic,
    size_sweep,
    temperature_sweep,
)

__all__ = [
    "DistanceStats",
    "LabColor",
    "NullModelKind",
    "Srgb8",
    "adjacent_distances",
    "analyze_image",
    "apply_temperature",
    "blackbody_rgb",
    "delta_e",
    "load_lab",
    "load_srgb",
    "null_distribution",
    "resize_bicubic",
    "seamlessness",
    "shuffle_pixels",
    "size_sweep",
    "srgb_to_lab",
    "srgb_to_lab_array",
    "temperature_sweep",
    "uniform_rgb",
]

__version__ = "0.1.0"
