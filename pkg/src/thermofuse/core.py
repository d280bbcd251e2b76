"""Shared domain types: thermal frames, focal stacks, fusion configuration.

Temperatures are stored as physical degrees Celsius in float64; nothing in
the pipeline normalizes them to display intensities. All types are
immutable after construction and every operation in the package treats its
inputs as read-only, so values can be shared freely across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from .errors import EmptyStack


class ZeroWeightPolicy(Enum):
    """What fusion weights to assign where every frame has zero activity."""

    UNIFORM_FALLBACK = "uniform"
    MAX_ACTIVITY_WINNER = "max-winner"


@dataclass(frozen=True, eq=False)
class ThermalImage:
    """A 2D grid of temperatures in degrees C, shape (height, width)."""

    temps: np.ndarray

    def __post_init__(self):
        t = np.array(self.temps, dtype=np.float64, order="C")
        if t.ndim != 2 or t.shape[0] < 1 or t.shape[1] < 1:
            raise ValueError(f"temps must be a non-empty 2D grid, got shape {t.shape}")
        t.setflags(write=False)
        object.__setattr__(self, "temps", t)

    @property
    def height(self) -> int:
        return self.temps.shape[0]

    @property
    def width(self) -> int:
        return self.temps.shape[1]

    def is_finite(self) -> bool:
        """True when no pixel is NaN or infinite."""
        return bool(np.isfinite(self.temps).all())


@dataclass(frozen=True, eq=False)
class FocalStack:
    """Ordered frames of one scene, indexed by lens position.

    Frame order is the acquisition order (file/CLI argument order);
    ``lens_positions`` (mm) are optional metadata used only for reporting.
    """

    frames: tuple[ThermalImage, ...]
    lens_positions: tuple[float, ...] | None = None

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise EmptyStack("a focal stack needs at least one frame")
        object.__setattr__(self, "frames", frames)
        if self.lens_positions is not None:
            object.__setattr__(
                self, "lens_positions", tuple(float(p) for p in self.lens_positions)
            )

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self) -> Iterator[ThermalImage]:
        return iter(self.frames)


@dataclass(frozen=True)
class FusionConfig:
    """Tunable knobs of the activity / selection / combination pipeline.

    window: side of the odd square neighborhood used by the activity
        measure (mean x variance of the second-derivative energy).
    frames_per_peak: how many frames to keep around each activity peak,
        the peak frame included.
    peak_min_separation: minimum index distance between accepted peaks.
    peak_threshold_frac: peaks below this fraction of the curve maximum
        are treated as noise.
    zero_weight_policy: weight fallback for pixels where every frame has
        zero activity.
    """

    window: int = 5
    frames_per_peak: int = 4
    peak_min_separation: int = 8
    peak_threshold_frac: float = 0.10
    zero_weight_policy: ZeroWeightPolicy = ZeroWeightPolicy.UNIFORM_FALLBACK

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and >= 3, got {self.window}")
        if self.frames_per_peak < 1:
            raise ValueError(f"frames_per_peak must be >= 1, got {self.frames_per_peak}")
        if self.peak_min_separation < 1:
            raise ValueError(
                f"peak_min_separation must be >= 1, got {self.peak_min_separation}"
            )
        if not 0.0 < self.peak_threshold_frac <= 1.0:
            raise ValueError(
                f"peak_threshold_frac must be in (0, 1], got {self.peak_threshold_frac}"
            )


@dataclass
class ValidationReport:
    """Outcome of validate_stack: ok, or the list of violations found."""

    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_stack(stack: FocalStack) -> ValidationReport:
    """Check focal-stack invariants, reporting violations as data.

    Violations checked: per-frame finiteness, dimension agreement across
    frames, and lens-position metadata consistency (same length as frames,
    strictly increasing).
    """
    violations: list[str] = []
    first = stack.frames[0]
    for i, frame in enumerate(stack.frames):
        if (frame.width, frame.height) != (first.width, first.height):
            violations.append(
                f"dimension mismatch at frame {i}: "
                f"{frame.width}x{frame.height} != {first.width}x{first.height}"
            )
        bad = ~np.isfinite(frame.temps)
        if bad.any():
            ys, xs = np.nonzero(bad)
            violations.append(
                f"non-finite temperature at frame {i}: {bad.sum()} pixel(s), "
                f"first at (x={xs[0]}, y={ys[0]})"
            )
    if stack.lens_positions is not None:
        pos = stack.lens_positions
        if len(pos) != len(stack.frames):
            violations.append(
                f"lens_positions has {len(pos)} entries for {len(stack.frames)} frames"
            )
        elif any(b <= a for a, b in zip(pos, pos[1:])):
            violations.append("lens_positions are not strictly increasing")
    return ValidationReport(violations)
