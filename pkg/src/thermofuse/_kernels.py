"""Hot numeric kernels with two interchangeable backends.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version. The active backend is chosen once at import time from the
``THERMOFUSE_BACKEND`` environment variable:

* unset or ``numba`` -- use numba when importable, else fall back to numpy
  (``numba`` alone additionally raises if numba is missing);
* ``numpy`` -- force the pure-numpy path.

Both variants of each kernel stay importable regardless of the active
backend so tests and benchmarks can compare them directly.
"""

from __future__ import annotations

import os

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


# ---------------------------------------------------------------------------
# pure-numpy implementations


def _np_second_derivative_energy(temps: np.ndarray) -> np.ndarray:
    """Squared response of the 3x3 second-derivative kernel, replicate-padded.

    Kernel weights: corners -1, edge neighbors -4, center +20 (zero sum).
    """
    p = np.pad(temps, 1, mode="edge")
    c = p[1:-1, 1:-1]
    edges = p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:]
    corners = p[:-2, :-2] + p[:-2, 2:] + p[2:, :-2] + p[2:, 2:]
    resp = 20.0 * c - 4.0 * edges - corners
    return resp * resp


def _np_windowed_mean_var(values: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel mean and population variance over a w x w window.

    Borders use replicate padding so every window keeps w*w samples.
    """
    r = window // 2
    p = np.pad(values, r, mode="edge")
    win = sliding_window_view(p, (window, window))
    mean = win.mean(axis=(-2, -1))
    dev = win - mean[..., None, None]
    var = np.mean(dev * dev, axis=(-2, -1))
    return mean, var


def _np_convolve_full(field: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Dense 2D convolution, 'full' output size, zero padding."""
    fh, fw = field.shape
    kh, kw = kernel.shape
    out = np.zeros((fh + kh - 1, fw + kw - 1), dtype=np.float64)
    for ky in range(kh):
        for kx in range(kw):
            w = kernel[ky, kx]
            if w != 0.0:
                out[ky:ky + fh, kx:kx + fw] += w * field
    return out


# ---------------------------------------------------------------------------
# numba implementations (arithmetic ordered to match the numpy versions
# where bit-level agreement is cheap to keep: the 3x3 kernel and the
# convolution accumulate in the same order on both paths)

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None
    HAVE_NUMBA = False


if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _nb_second_derivative_energy(temps):
        h, w = temps.shape
        out = np.empty((h, w), dtype=np.float64)
        for y in range(h):
            yu = y - 1 if y > 0 else 0
            yd = y + 1 if y < h - 1 else h - 1
            for x in range(w):
                xl = x - 1 if x > 0 else 0
                xr = x + 1 if x < w - 1 else w - 1
                edges = temps[yu, x] + temps[yd, x] + temps[y, xl] + temps[y, xr]
                corners = temps[yu, xl] + temps[yu, xr] + temps[yd, xl] + temps[yd, xr]
                resp = 20.0 * temps[y, x] - 4.0 * edges - corners
                out[y, x] = resp * resp
        return out

    @njit(cache=True, nogil=True)
    def _nb_windowed_mean_var(values, window):
        h, w = values.shape
        r = window // 2
        n = float(window * window)
        mean = np.empty((h, w), dtype=np.float64)
        var = np.empty((h, w), dtype=np.float64)
        for y in range(h):
            for x in range(w):
                s = 0.0
                for dy in range(-r, r + 1):
                    yy = y + dy
                    if yy < 0:
                        yy = 0
                    elif yy > h - 1:
                        yy = h - 1
                    for dx in range(-r, r + 1):
                        xx = x + dx
                        if xx < 0:
                            xx = 0
                        elif xx > w - 1:
                            xx = w - 1
                        s += values[yy, xx]
                m = s / n
                sq = 0.0
                for dy in range(-r, r + 1):
                    yy = y + dy
                    if yy < 0:
                        yy = 0
                    elif yy > h - 1:
                        yy = h - 1
                    for dx in range(-r, r + 1):
                        xx = x + dx
                        if xx < 0:
                            xx = 0
                        elif xx > w - 1:
                            xx = w - 1
                        d = values[yy, xx] - m
                        sq += d * d
                mean[y, x] = m
                var[y, x] = sq / n
        return mean, var

    @njit(cache=True, nogil=True)
    def _nb_convolve_full(field, kernel):
        fh, fw = field.shape
        kh, kw = kernel.shape
        out = np.zeros((fh + kh - 1, fw + kw - 1), dtype=np.float64)
        for ky in range(kh):
            for kx in range(kw):
                w = kernel[ky, kx]
                if w != 0.0:
                    for y in range(fh):
                        for x in range(fw):
                            out[ky + y, kx + x] += w * field[y, x]
        return out

else:  # pragma: no cover
    _nb_second_derivative_energy = None
    _nb_windowed_mean_var = None
    _nb_convolve_full = None


# ---------------------------------------------------------------------------
# backend selection

_requested = os.environ.get("THERMOFUSE_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"THERMOFUSE_BACKEND={_requested!r} is not supported (use 'numba' or 'numpy')"
    )
if _requested == "numba" and not HAVE_NUMBA:
    raise RuntimeError("THERMOFUSE_BACKEND=numba but numba is not importable")

USE_NUMBA = HAVE_NUMBA and _requested != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"

if USE_NUMBA:
    second_derivative_energy = _nb_second_derivative_energy
    windowed_mean_var = _nb_windowed_mean_var
    convolve_full = _nb_convolve_full
else:
    second_derivative_energy = _np_second_derivative_energy
    windowed_mean_var = _np_windowed_mean_var
    convolve_full = _np_convolve_full
