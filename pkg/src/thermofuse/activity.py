"""Per-pixel activity level of a frame: how much focused detail it carries.

The measure is computed in two steps. First the squared response of a 3x3
second-derivative kernel (corners -1, edge neighbors -4, center +20) gives
the energy map; then the activity at a pixel is the product of the mean and
the population variance of that energy over an odd w x w neighborhood.
Borders use replicate padding in both steps so the estimator support never
shrinks. Activity is invariant to constant temperature offsets (the kernel
sums to zero) and scales as the sixth power of a gain applied to the input.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from . import _kernels
from .core import FocalStack, FusionConfig, ThermalImage
from .errors import WindowTooLarge


def energy_of_laplacian(img: ThermalImage) -> np.ndarray:
    """Squared 3x3 second-derivative response at every pixel (all >= 0)."""
    return _kernels.second_derivative_energy(img.temps)


def windowed_mean_variance(values: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    """Mean and population variance of `values` over a centered w x w window.

    Raises WindowTooLarge when the window exceeds either dimension.
    """
    values = np.asarray(values, dtype=np.float64)
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 3, got {window}")
    h, w = values.shape
    if window > h or window > w:
        raise WindowTooLarge(f"window {window} exceeds image dimensions {w}x{h}")
    return _kernels.windowed_mean_var(values, window)


def compute_activity(img: ThermalImage, cfg: FusionConfig = FusionConfig()) -> np.ndarray:
    """Activity map of one frame: windowed mean x windowed variance of the
    second-derivative energy. Same shape as the frame, all entries >= 0."""
    eol = energy_of_laplacian(img)
    mean, var = windowed_mean_variance(eol, cfg.window)
    return mean * var


def stack_activity(
    stack: FocalStack | Sequence[ThermalImage],
    cfg: FusionConfig = FusionConfig(),
    jobs: int = 1,
) -> list[np.ndarray]:
    """Activity map for every frame, optionally across a thread pool.

    Frames are independent, so the result is identical for any `jobs`.
    """
    frames = list(stack.frames if isinstance(stack, FocalStack) else stack)
    if jobs is None or jobs < 1:
        jobs = 1
    if jobs == 1 or len(frames) == 1:
        return [compute_activity(f, cfg) for f in frames]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda f: compute_activity(f, cfg), frames))
