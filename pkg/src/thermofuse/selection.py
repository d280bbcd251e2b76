"""Frame pre-selection: peak finding on the per-frame max-activity curve.

Fully blurred frames contribute only noise to the weighted combination, so
the pipeline keeps just the frames nearest each peak of the curve
``i -> max(activity_i)``. Peaks are strict local maxima (plateaus resolve
to their leftmost index) that clear a relative threshold; nearby smaller
peaks are suppressed greedily by descending value. Every tie anywhere
breaks toward the lower frame index, keeping the whole pipeline
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import FusionConfig
from .errors import DimensionMismatch, EmptyStack


@dataclass(frozen=True)
class SelectionResult:
    """Peaks found on the activity curve and the frame indices kept."""

    peak_indices: tuple[int, ...]
    selected_indices: tuple[int, ...]


def max_activity_curve(maps: Sequence[np.ndarray]) -> np.ndarray:
    """Per-frame maximum activity, index-aligned with the stack."""
    if len(maps) == 0:
        raise EmptyStack("no activity maps")
    shape = np.shape(maps[0])
    for i, m in enumerate(maps):
        if np.shape(m) != shape:
            raise DimensionMismatch(f"activity map {i} has shape {np.shape(m)} != {shape}")
    return np.array([float(np.max(m)) for m in maps])


def _plateau_maxima(curve: np.ndarray) -> list[int]:
    """Leftmost index of every run of equal values higher than both sides."""
    n = len(curve)
    maxima = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and curve[j + 1] == curve[i]:
            j += 1
        left_ok = i == 0 or curve[i - 1] < curve[i]
        right_ok = j == n - 1 or curve[j + 1] < curve[i]
        if left_ok and right_ok:
            maxima.append(i)
        i = j + 1
    return maxima


def find_peaks(curve: np.ndarray | Sequence[float], cfg: FusionConfig = FusionConfig()) -> tuple[int, ...]:
    """Indices of accepted activity peaks, sorted ascending.

    A candidate is a (plateau-resolved) strict local maximum with value at
    least ``peak_threshold_frac`` of the global maximum. Candidates are
    accepted greedily by descending value; any candidate closer than
    ``peak_min_separation`` to an accepted higher peak is dropped. An
    all-zero curve has no peaks.
    """
    curve = np.asarray(curve, dtype=np.float64)
    if curve.ndim != 1 or len(curve) == 0:
        raise ValueError("curve must be a non-empty 1D sequence")
    top = float(curve.max())
    if top <= 0.0:
        return ()
    threshold = cfg.peak_threshold_frac * top
    candidates = [i for i in _plateau_maxima(curve) if curve[i] >= threshold]
    candidates.sort(key=lambda i: (-curve[i], i))
    accepted: list[int] = []
    for i in candidates:
        if all(abs(i - a) >= cfg.peak_min_separation for a in accepted):
            accepted.append(i)
    return tuple(sorted(accepted))


def select_frames(curve: np.ndarray | Sequence[float], cfg: FusionConfig = FusionConfig()) -> SelectionResult:
    """Frames to keep: the ``frames_per_peak`` nearest frames to each peak.

    Candidates around a peak p are ordered by (|i - p|, i), so ties break
    toward the lower index; selections from different peaks are unioned.
    With no peaks at all, the single global-argmax frame is kept.
    """
    curve = np.asarray(curve, dtype=np.float64)
    peaks = find_peaks(curve, cfg)
    n = len(curve)
    if not peaks:
        return SelectionResult((), (int(np.argmax(curve)),))
    selected: set[int] = set()
    for p in peaks:
        order = sorted(range(n), key=lambda i: (abs(i - p), i))
        selected.update(order[: cfg.frames_per_peak])
    return SelectionResult(peaks, tuple(sorted(selected)))
