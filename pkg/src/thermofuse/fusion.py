"""Weighted per-pixel combination of focal-stack frames.

Activity maps become per-pixel weights by normalizing them to sum to one
across frames; the fused temperature is the weighted average of the frame
temperatures. Where no frame has any activity the configured fallback
policy applies. The full pipeline runs either on every frame or on the
pre-selected subset around the activity peaks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .activity import stack_activity
from .core import FocalStack, FusionConfig, ThermalImage, ZeroWeightPolicy, validate_stack
from .errors import DimensionMismatch, EmptyStack, ValidationError
from .selection import SelectionResult, max_activity_curve, select_frames


def normalize_weights(
    maps: Sequence[np.ndarray],
    policy: ZeroWeightPolicy = ZeroWeightPolicy.UNIFORM_FALLBACK,
) -> np.ndarray:
    """Per-pixel weights from activity maps, shape (n_frames, h, w).

    At each pixel the weights are the activities divided by their sum. Where
    the sum is zero, UNIFORM_FALLBACK assigns 1/n to every frame and
    MAX_ACTIVITY_WINNER assigns 1 to the lowest-index frame. Weights lie in
    [0, 1] and sum to 1 at every pixel.
    """
    if len(maps) == 0:
        raise EmptyStack("no activity maps to normalize")
    shape = np.shape(maps[0])
    for i, m in enumerate(maps):
        if np.shape(m) != shape:
            raise DimensionMismatch(f"activity map {i} has shape {np.shape(m)} != {shape}")
    m = np.stack([np.asarray(a, dtype=np.float64) for a in maps])
    total = m.sum(axis=0)
    dead = total == 0.0
    weights = m / np.where(dead, 1.0, total)
    if policy is ZeroWeightPolicy.UNIFORM_FALLBACK:
        weights[:, dead] = 1.0 / len(maps)
    else:
        weights[:, dead] = 0.0
        weights[0, dead] = 1.0
    return weights


def fuse_stack(frames: Sequence[ThermalImage], weights: np.ndarray) -> ThermalImage:
    """Per-pixel weighted average of the frames under the given weights.

    The result is clipped to the per-pixel [min, max] across frames, which
    a convex combination satisfies up to roundoff; clipping makes the bound
    hold exactly.
    """
    if len(frames) == 0:
        raise EmptyStack("no frames to fuse")
    if weights.shape[0] != len(frames):
        raise DimensionMismatch(
            f"{len(frames)} frames but {weights.shape[0]} weight planes"
        )
    shape = frames[0].temps.shape
    for i, f in enumerate(frames):
        if f.temps.shape != shape:
            raise DimensionMismatch(f"frame {i} has shape {f.temps.shape} != {shape}")
    if weights.shape[1:] != shape:
        raise DimensionMismatch(
            f"weights have shape {weights.shape[1:]} but frames are {shape}"
        )
    temps = np.stack([f.temps for f in frames])
    fused = (weights * temps).sum(axis=0)
    np.clip(fused, temps.min(axis=0), temps.max(axis=0), out=fused)
    return ThermalImage(fused)


@dataclass(frozen=True)
class FusionOutcome:
    """Fused image plus the diagnostics the pipeline produced on the way."""

    fused: ThermalImage
    selection: SelectionResult
    curve: np.ndarray


def fuse_pipeline(
    stack: FocalStack,
    cfg: FusionConfig = FusionConfig(),
    preselect: bool = True,
    jobs: int = 1,
) -> FusionOutcome:
    """Activity -> (optional) frame pre-selection -> weighted combination.

    With ``preselect`` the combination uses only the frames around the
    activity peaks; without it, every frame enters (the plain linear-fusion
    baseline). The returned selection always lists the frame indices that
    actually entered the combination.
    """
    report = validate_stack(stack)
    if not report.ok:
        raise ValidationError("; ".join(report.violations))
    maps = stack_activity(stack, cfg, jobs=jobs)
    curve = max_activity_curve(maps)
    picked = select_frames(curve, cfg)
    if preselect:
        indices = picked.selected_indices
    else:
        indices = tuple(range(len(stack)))
    selection = SelectionResult(picked.peak_indices, indices)
    weights = normalize_weights([maps[i] for i in indices], cfg.zero_weight_policy)
    fused = fuse_stack([stack.frames[i] for i in indices], weights)
    return FusionOutcome(fused, selection, curve)
