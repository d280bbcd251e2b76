"""File formats: CSV and 16-bit PGM frames, stack manifests, probe lists.

CSV frames are lossless and human-auditable: one image row per line,
comma-separated temperatures with '.' decimal separator, written with
round-tripping float repr. PGM frames are binary P5 with maxval 65535,
big-endian samples, mapped linearly between the manifest's t_min and t_max
degrees C, so a save/load round trip is exact within half a quantization
step. A manifest is a JSON file listing the ordered frame paths (relative
paths resolve against the manifest's directory).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import FocalStack, ThermalImage, validate_stack
from .errors import ParseError, ValidationError
from .metrics import ProbePoint

FORMAT_CSV = "csv"
FORMAT_PGM16 = "pgm16"
PGM_MAXVAL = 65535


# ---------------------------------------------------------------------------
# single frames


def save_csv(path: str | Path, img: ThermalImage):
    lines = [",".join(repr(v) for v in row) for row in img.temps.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_csv(path: str | Path) -> ThermalImage:
    path = Path(path)
    rows = []
    width = None
    text = path.read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        try:
            row = [float(c) for c in cells]
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(
                f"{path}:{lineno}: row has {len(row)} values, expected {width}"
            )
        rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no rows")
    return ThermalImage(np.array(rows))


def save_pgm16(path: str | Path, img: ThermalImage, t_min: float, t_max: float):
    if not t_max > t_min:
        raise ValueError(f"t_max must exceed t_min, got [{t_min}, {t_max}]")
    scaled = (img.temps - t_min) / (t_max - t_min) * PGM_MAXVAL
    q = np.clip(np.rint(scaled), 0, PGM_MAXVAL).astype(">u2")
    header = f"P5\n{img.width} {img.height}\n{PGM_MAXVAL}\n".encode("ascii")
    Path(path).write_bytes(header + q.tobytes())


def _pgm_tokens(data: bytes, count: int, path: Path) -> tuple[list[bytes], int]:
    """First `count` whitespace-separated header tokens, skipping comments.
    Returns the tokens and the offset just past the single whitespace byte
    that terminates the last one."""
    tokens = []
    i = 0
    while len(tokens) < count:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if i < len(data) and data[i:i + 1] == b"#":
            while i < len(data) and data[i:i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < len(data) and not data[i:i + 1].isspace():
            i += 1
        if i == start:
            raise ParseError(f"{path}: truncated header at byte {i}")
        tokens.append(data[start:i])
    if i >= len(data):
        raise ParseError(f"{path}: missing raster after header")
    return tokens, i + 1


def load_pgm16(path: str | Path, t_min: float, t_max: float) -> ThermalImage:
    path = Path(path)
    if not t_max > t_min:
        raise ValueError(f"t_max must exceed t_min, got [{t_min}, {t_max}]")
    data = path.read_bytes()
    tokens, offset = _pgm_tokens(data, 4, path)
    if tokens[0] != b"P5":
        raise ParseError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    if not all(re.fullmatch(rb"\d+", t) for t in tokens[1:]):
        raise ParseError(f"{path}: non-numeric header fields {tokens[1:]}")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval != PGM_MAXVAL:
        raise ParseError(f"{path}: maxval must be {PGM_MAXVAL}, got {maxval}")
    expected = width * height * 2
    raster = data[offset:offset + expected]
    if len(raster) != expected:
        raise ParseError(
            f"{path}: raster holds {len(raster)} bytes at offset {offset}, "
            f"expected {expected}"
        )
    q = np.frombuffer(raster, dtype=">u2").reshape(height, width)
    temps = t_min + q.astype(np.float64) / PGM_MAXVAL * (t_max - t_min)
    return ThermalImage(temps)


# ---------------------------------------------------------------------------
# manifests and whole stacks


@dataclass(frozen=True)
class StackManifest:
    """Ordered frame files of one stack plus their storage format."""

    format: str
    frame_paths: tuple[str, ...]
    lens_positions_mm: tuple[float, ...] | None = None
    t_min: float | None = None
    t_max: float | None = None


def load_manifest(path: str | Path) -> StackManifest:
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        fmt = d["format"]
        frames = tuple(str(p) for p in d["frames"])
        lens = d.get("lens_positions_mm")
        manifest = StackManifest(
            format=fmt,
            frame_paths=frames,
            lens_positions_mm=None if lens is None else tuple(float(p) for p in lens),
            t_min=None if d.get("t_min") is None else float(d["t_min"]),
            t_max=None if d.get("t_max") is None else float(d["t_max"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad manifest: {exc}") from exc
    if manifest.format not in (FORMAT_CSV, FORMAT_PGM16):
        raise ParseError(f"{path}: unknown format {manifest.format!r}")
    if not manifest.frame_paths:
        raise ParseError(f"{path}: manifest lists no frames")
    if manifest.format == FORMAT_PGM16:
        if manifest.t_min is None or manifest.t_max is None:
            raise ParseError(f"{path}: pgm16 manifests need t_min and t_max")
        if not manifest.t_max > manifest.t_min:
            raise ParseError(f"{path}: t_max must exceed t_min")
    return manifest


def load_stack(manifest_path: str | Path) -> tuple[FocalStack, StackManifest]:
    """Load and validate the stack a manifest describes.

    Raises FileNotFoundError / ParseError for unreadable frames and
    ValidationError when the loaded frames break stack invariants.
    """
    manifest_path = Path(manifest_path)
    manifest = load_manifest(manifest_path)
    base = manifest_path.parent
    frames = []
    for rel in manifest.frame_paths:
        frame_path = base / rel
        if not frame_path.exists():
            raise FileNotFoundError(f"frame file not found: {frame_path}")
        if manifest.format == FORMAT_CSV:
            frames.append(load_csv(frame_path))
        else:
            frames.append(load_pgm16(frame_path, manifest.t_min, manifest.t_max))
    stack = FocalStack(tuple(frames), manifest.lens_positions_mm)
    report = validate_stack(stack)
    if not report.ok:
        raise ValidationError("; ".join(report.violations))
    return stack, manifest


def save_image(path: str | Path, img: ThermalImage, manifest: StackManifest):
    """Write one image in the manifest's format (used for fused outputs)."""
    if manifest.format == FORMAT_CSV:
        save_csv(path, img)
    else:
        save_pgm16(path, img, manifest.t_min, manifest.t_max)


def save_stack(
    out_dir: str | Path,
    stack: FocalStack,
    fmt: str = FORMAT_CSV,
    t_min: float | None = None,
    t_max: float | None = None,
    prefix: str = "frame",
) -> Path:
    """Write every frame plus a manifest.json into `out_dir`; returns the
    manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = "csv" if fmt == FORMAT_CSV else "pgm"
    names = [f"{prefix}_{i:03d}.{ext}" for i in range(len(stack))]
    for name, frame in zip(names, stack.frames):
        if fmt == FORMAT_CSV:
            save_csv(out_dir / name, frame)
        elif fmt == FORMAT_PGM16:
            save_pgm16(out_dir / name, frame, t_min, t_max)
        else:
            raise ValueError(f"unknown format {fmt!r}")
    doc: dict = {"format": fmt, "frames": names}
    if stack.lens_positions is not None:
        doc["lens_positions_mm"] = list(stack.lens_positions)
    if fmt == FORMAT_PGM16:
        doc["t_min"] = t_min
        doc["t_max"] = t_max
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(doc, indent=2) + "\n")
    return manifest_path


# ---------------------------------------------------------------------------
# probes and curve export


def save_probes(path: str | Path, probes: tuple[ProbePoint, ...] | list[ProbePoint]):
    doc = [{"x": p.x, "y": p.y, "true_temp": p.true_temp} for p in probes]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_probes(path: str | Path) -> tuple[ProbePoint, ...]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
        return tuple(
            ProbePoint(int(p["x"]), int(p["y"]), float(p["true_temp"])) for p in doc
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad probe list: {exc}") from exc


def format_curve_csv(curve, peaks, selected) -> str:
    """CSV rows frame_index,max_activity,is_peak,is_selected for plotting."""
    peaks = set(peaks)
    selected = set(selected)
    lines = ["frame_index,max_activity,is_peak,is_selected"]
    for i, value in enumerate(curve):
        lines.append(
            f"{i},{repr(float(value))},{int(i in peaks)},{int(i in selected)}"
        )
    return "\n".join(lines) + "\n"
