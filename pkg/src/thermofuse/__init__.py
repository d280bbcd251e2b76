"""Radiometric multi-focus fusion of thermal focal stacks.

Combines a stack of thermal images taken at successive lens positions into
one all-in-focus temperature map: per-pixel activity analysis, automatic
pre-selection of the informative frames, and normalized-weight averaging,
plus quality metrics and a defocus simulator for ground-truthed testing.
"""

from ._kernels import BACKEND
from .activity import compute_activity, energy_of_laplacian, stack_activity, windowed_mean_variance
from .core import (
    FocalStack,
    FusionConfig,
    ThermalImage,
    ValidationReport,
    ZeroWeightPolicy,
    validate_stack,
)
from .fusion import FusionOutcome, fuse_pipeline, fuse_stack, normalize_weights
from .metrics import (
    MetricsReport,
    ProbePoint,
    compare_against_stack,
    cross_correlation,
    hte,
    mae,
    probe_readout,
    rmse,
)
from .optics import (
    LensSpec,
    SceneObject,
    SceneSpec,
    airy_disc_diameter,
    airy_disc_diameter_far_field,
    depth_of_field,
    disc_kernel,
    preset_scene,
    render_ground_truth,
    simulate_stack,
)
from .selection import SelectionResult, find_peaks, max_activity_curve, select_frames

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FocalStack",
    "FusionConfig",
    "FusionOutcome",
    "LensSpec",
    "MetricsReport",
    "ProbePoint",
    "SceneObject",
    "SceneSpec",
    "SelectionResult",
    "ThermalImage",
    "ValidationReport",
    "ZeroWeightPolicy",
    "airy_disc_diameter",
    "airy_disc_diameter_far_field",
    "compare_against_stack",
    "compute_activity",
    "cross_correlation",
    "depth_of_field",
    "disc_kernel",
    "energy_of_laplacian",
    "find_peaks",
    "fuse_pipeline",
    "fuse_stack",
    "hte",
    "mae",
    "max_activity_curve",
    "normalize_weights",
    "preset_scene",
    "probe_readout",
    "render_ground_truth",
    "rmse",
    "select_frames",
    "simulate_stack",
    "stack_activity",
    "validate_stack",
    "windowed_mean_variance",
]
