"""Fusion quality metrics against a reference image and probe points.

The correlation here is the fusion-quality variant (no mean subtraction):
``2*sum(R*F) / (sum(R^2) + sum(F^2))``, which is 1 only for identical
images and stays in [0, 1] for non-negative images. Temperature accuracy
at known object locations is scored by the mean absolute probe error; the
readout at a probe is the maximum pixel inside a small window, because
defocus spreads a hot object's energy and depresses its peak.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import FocalStack, ThermalImage
from .errors import DegenerateInput, DimensionMismatch, ProbeOutOfBounds


@dataclass(frozen=True)
class ProbePoint:
    """A pixel location with the temperature that should be measured there."""

    x: int
    y: int
    true_temp: float


@dataclass
class MetricsReport:
    """Aggregated quality metrics; `hte` is None when no probes were given."""

    cc: float
    rmse: float
    mae: float
    hte: float | None = None
    per_frame: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "cc": self.cc,
            "rmse": self.rmse,
            "mae": self.mae,
            "hte": self.hte,
            "per_frame": self.per_frame,
        }


def _check_same_shape(ref: ThermalImage, fused: ThermalImage):
    if ref.temps.shape != fused.temps.shape:
        raise DimensionMismatch(
            f"reference is {ref.width}x{ref.height}, "
            f"other image is {fused.width}x{fused.height}"
        )


def cross_correlation(ref: ThermalImage, fused: ThermalImage) -> float:
    """2*sum(R*F) / (sum(R^2) + sum(F^2)); symmetric, 1 iff identical."""
    _check_same_shape(ref, fused)
    r = ref.temps
    f = fused.temps
    denom = (r * r).sum() + (f * f).sum()
    if denom == 0.0:
        raise DegenerateInput("both images are identically zero")
    return float(2.0 * (r * f).sum() / denom)


def rmse(ref: ThermalImage, fused: ThermalImage) -> float:
    """Root mean squared pixel difference in degrees C."""
    _check_same_shape(ref, fused)
    d = ref.temps - fused.temps
    return float(np.sqrt(np.mean(d * d)))


def mae(ref: ThermalImage, fused: ThermalImage) -> float:
    """Mean absolute pixel difference in degrees C."""
    _check_same_shape(ref, fused)
    return float(np.mean(np.abs(ref.temps - fused.temps)))


def probe_readout(image: ThermalImage, x: int, y: int, radius: int = 2) -> float:
    """Measured temperature at a probe: max pixel in the (2r+1)^2 window
    centered on (x, y), clipped to the image."""
    if not (0 <= x < image.width and 0 <= y < image.height):
        raise ProbeOutOfBounds(f"probe ({x}, {y}) outside {image.width}x{image.height}")
    y0 = max(y - radius, 0)
    y1 = min(y + radius + 1, image.height)
    x0 = max(x - radius, 0)
    x1 = min(x + radius + 1, image.width)
    return float(image.temps[y0:y1, x0:x1].max())


def hte(image: ThermalImage, probes: tuple[ProbePoint, ...] | list[ProbePoint], readout_radius: int = 2) -> float:
    """Mean absolute probe error: average over probes of
    |readout - true_temp|. With two probes this is half the total error."""
    if len(probes) == 0:
        raise ValueError("hte needs at least one probe")
    errors = [
        abs(probe_readout(image, p.x, p.y, readout_radius) - p.true_temp)
        for p in probes
    ]
    return float(np.mean(errors))


def compare_against_stack(stack: FocalStack, reference: ThermalImage) -> list[tuple[float, float]]:
    """Per-frame (rmse, cc) of every stack frame versus the given image."""
    return [
        (rmse(reference, frame), cross_correlation(reference, frame))
        for frame in stack.frames
    ]
