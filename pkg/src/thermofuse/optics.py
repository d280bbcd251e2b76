"""Defocus optics: diffraction-limit formulas and a focal-stack simulator.

The scalar formulas give the Airy disc diameter (2.44*lambda*v/D, or
2.44*lambda*N far from the minimum focal distance) and the
diffraction-limited depth of field D^2/(4*lambda).

The simulator manufactures ground-truthed focal stacks of a scene with
several warm objects, each sharp at its own lens position. An object is
rendered as a cone-profiled patch (peak temperature at the centroid,
falling linearly toward the rim) so that both its silhouette and its
interior carry focusable detail; frame i shows it convolved with a
normalized disc kernel whose radius grows linearly with the distance from
the in-focus frame, capped at `max_blur_radius`. Optional zero-mean pixel
noise models the camera's NETD floor and is drawn from a per-frame
substream of the given seed, so identical inputs give bit-identical
stacks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import FocalStack, ThermalImage
from .errors import InvalidScene, NonPositiveInput
from .metrics import ProbePoint


# ---------------------------------------------------------------------------
# diffraction formulas


def _require_positive(**params: float):
    for name, value in params.items():
        if not value > 0:
            raise NonPositiveInput(f"{name} must be > 0, got {value}")


def airy_disc_diameter(wavelength: float, image_distance: float, aperture_diameter: float) -> float:
    """Airy disc diameter 2.44 * wavelength * image_distance / aperture (m)."""
    _require_positive(
        wavelength=wavelength,
        image_distance=image_distance,
        aperture_diameter=aperture_diameter,
    )
    return 2.44 * wavelength * image_distance / aperture_diameter


def airy_disc_diameter_far_field(wavelength: float, f_number: float) -> float:
    """Airy disc diameter 2.44 * wavelength * f_number, valid away from the
    minimum focal distance (m)."""
    _require_positive(wavelength=wavelength, f_number=f_number)
    return 2.44 * wavelength * f_number


def depth_of_field(aperture_diameter: float, wavelength: float) -> float:
    """Diffraction-limited depth of field D^2 / (4 * wavelength) (m)."""
    _require_positive(aperture_diameter=aperture_diameter, wavelength=wavelength)
    return aperture_diameter * aperture_diameter / (4.0 * wavelength)


@dataclass(frozen=True)
class LensSpec:
    """Optical parameters of one lens, SI units."""

    wavelength: float
    aperture_diameter: float
    f_number: float
    image_distance: float

    def __post_init__(self):
        _require_positive(
            wavelength=self.wavelength,
            aperture_diameter=self.aperture_diameter,
            f_number=self.f_number,
            image_distance=self.image_distance,
        )

    def airy_disc_diameter(self) -> float:
        return airy_disc_diameter(self.wavelength, self.image_distance, self.aperture_diameter)

    def airy_disc_diameter_far_field(self) -> float:
        return airy_disc_diameter_far_field(self.wavelength, self.f_number)

    def depth_of_field(self) -> float:
        return depth_of_field(self.aperture_diameter, self.wavelength)


# ---------------------------------------------------------------------------
# synthetic scenes


@dataclass(frozen=True)
class SceneObject:
    """One warm object: a disc or an axis-aligned rectangle in pixel coords.

    The rendered temperature peaks at (cx, cy) with the object's `temp` and
    falls linearly by `edge_drop` degrees toward the rim (default: 35% of
    the contrast against the local background).
    """

    shape: str  # "disc" | "rect"
    cx: int
    cy: int
    temp: float
    focus_index: int
    radius: float = 0.0
    half_width: float = 0.0
    half_height: float = 0.0
    edge_drop: float | None = None


@dataclass(frozen=True)
class SceneSpec:
    """Synthetic scene: canvas, background, objects and defocus behavior.

    `background_temp_right`, when set, gives the right half of the canvas a
    different background temperature (a non-homogeneous backdrop). Blur
    radius for object o in frame i is
    min(blur_slope * |i - o.focus_index|, max_blur_radius) pixels.
    """

    width: int
    height: int
    background_temp: float
    frames: int
    blur_slope: float
    objects: tuple[SceneObject, ...]
    noise_sigma: float = 0.02
    max_blur_radius: float = 12.0
    background_temp_right: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))


def validate_scene(scene: SceneSpec):
    """Raise InvalidScene on any constraint violation."""
    if scene.width < 1 or scene.height < 1:
        raise InvalidScene(f"canvas must be non-empty, got {scene.width}x{scene.height}")
    if scene.frames < 1:
        raise InvalidScene(f"frames must be >= 1, got {scene.frames}")
    if scene.blur_slope < 0:
        raise InvalidScene(f"blur_slope must be >= 0, got {scene.blur_slope}")
    if scene.max_blur_radius < 0:
        raise InvalidScene(f"max_blur_radius must be >= 0, got {scene.max_blur_radius}")
    if scene.noise_sigma < 0:
        raise InvalidScene(f"noise_sigma must be >= 0, got {scene.noise_sigma}")
    if not scene.objects:
        raise InvalidScene("scene has no objects")
    for k, obj in enumerate(scene.objects):
        if obj.shape not in ("disc", "rect"):
            raise InvalidScene(f"object {k}: unknown shape {obj.shape!r}")
        if not (0 <= obj.focus_index < scene.frames):
            raise InvalidScene(
                f"object {k}: focus_index {obj.focus_index} outside [0, {scene.frames})"
            )
        if not np.isfinite(obj.temp):
            raise InvalidScene(f"object {k}: non-finite temperature")
        if obj.shape == "disc" and obj.radius < 1:
            raise InvalidScene(f"object {k}: disc radius must be >= 1, got {obj.radius}")
        if obj.shape == "rect" and (obj.half_width < 1 or obj.half_height < 1):
            raise InvalidScene(f"object {k}: rect half sizes must be >= 1")
        if not (0 <= obj.cx < scene.width and 0 <= obj.cy < scene.height):
            raise InvalidScene(f"object {k}: centroid outside the canvas")


def disc_kernel(radius: float) -> np.ndarray:
    """Normalized defocus kernel: a pillbox of the given pixel radius with a
    one-pixel anti-aliased rim. Radius below half a pixel is the identity."""
    if radius < 0:
        raise InvalidScene(f"blur radius must be >= 0, got {radius}")
    half = int(np.floor(radius + 0.5))
    if half < 1:
        return np.ones((1, 1))
    yy, xx = np.mgrid[-half:half + 1, -half:half + 1]
    dist = np.sqrt((yy * yy + xx * xx).astype(np.float64))
    k = np.clip(radius + 0.5 - dist, 0.0, 1.0)
    return k / k.sum()


def _background_canvas(scene: SceneSpec) -> np.ndarray:
    canvas = np.full((scene.height, scene.width), scene.background_temp, dtype=np.float64)
    if scene.background_temp_right is not None:
        canvas[:, scene.width // 2:] = scene.background_temp_right
    return canvas


def _object_patch(scene: SceneSpec, obj: SceneObject, background: np.ndarray):
    """Temperature delta the object adds over the background, cropped to its
    bounding box. Returns (delta, y0, x0)."""
    if obj.shape == "disc":
        rx = ry = obj.radius
    else:
        rx, ry = obj.half_width, obj.half_height
    x0 = max(int(np.floor(obj.cx - rx)), 0)
    x1 = min(int(np.ceil(obj.cx + rx)) + 1, scene.width)
    y0 = max(int(np.floor(obj.cy - ry)), 0)
    y1 = min(int(np.ceil(obj.cy + ry)) + 1, scene.height)
    yy, xx = np.mgrid[y0:y1, x0:x1]
    if obj.shape == "disc":
        frac = np.sqrt(((yy - obj.cy) ** 2 + (xx - obj.cx) ** 2).astype(np.float64)) / obj.radius
    else:
        frac = np.maximum(
            np.abs(xx - obj.cx) / obj.half_width, np.abs(yy - obj.cy) / obj.half_height
        )
    mask = frac <= 1.0
    local_bg = background[obj.cy, obj.cx]
    drop = obj.edge_drop
    if drop is None:
        drop = 0.35 * (obj.temp - local_bg)
    profile = obj.temp - drop * frac
    delta = np.where(mask, profile - background[y0:y1, x0:x1], 0.0)
    return delta, y0, x0


def _add_patch(frame: np.ndarray, patch: np.ndarray, y0: int, x0: int):
    """Accumulate `patch` into `frame` at (y0, x0), clipping at the borders."""
    h, w = frame.shape
    ph, pw = patch.shape
    ty0, tx0 = max(y0, 0), max(x0, 0)
    ty1, tx1 = min(y0 + ph, h), min(x0 + pw, w)
    if ty0 >= ty1 or tx0 >= tx1:
        return
    frame[ty0:ty1, tx0:tx1] += patch[ty0 - y0:ty1 - y0, tx0 - x0:tx1 - x0]


def render_ground_truth(scene: SceneSpec) -> tuple[ThermalImage, tuple[ProbePoint, ...]]:
    """All-in-focus image of the scene plus one probe per object centroid."""
    validate_scene(scene)
    background = _background_canvas(scene)
    gt = background.copy()
    occupancy = np.zeros_like(gt, dtype=np.int64)
    probes = []
    for obj in scene.objects:
        delta, y0, x0 = _object_patch(scene, obj, background)
        _add_patch(gt, delta, y0, x0)
        _add_patch(occupancy, (delta != 0.0).astype(np.int64), y0, x0)
        probes.append(ProbePoint(obj.cx, obj.cy, obj.temp))
    if (occupancy > 1).any():
        raise InvalidScene("objects overlap; the reference image would be ambiguous")
    return ThermalImage(gt), tuple(probes)


def simulate_stack(scene: SceneSpec, seed: int = 0) -> tuple[FocalStack, ThermalImage, tuple[ProbePoint, ...]]:
    """Generate the defocused stack, its ground truth, and the probe points.

    Frame i holds each object blurred for its distance to the in-focus
    frame, plus (for noise_sigma > 0) Gaussian noise from the substream
    (seed, i). Identical scene and seed give bit-identical output.
    """
    if seed < 0:
        raise InvalidScene(f"seed must be >= 0, got {seed}")
    gt, probes = render_ground_truth(scene)
    background = _background_canvas(scene)
    patches = [_object_patch(scene, obj, background) for obj in scene.objects]
    kernels: dict[float, np.ndarray] = {}
    frames = []
    for i in range(scene.frames):
        frame = background.copy()
        for obj, (delta, y0, x0) in zip(scene.objects, patches):
            radius = min(scene.blur_slope * abs(i - obj.focus_index), scene.max_blur_radius)
            kernel = kernels.get(radius)
            if kernel is None:
                kernel = kernels.setdefault(radius, disc_kernel(radius))
            if kernel.shape == (1, 1):
                _add_patch(frame, delta, y0, x0)
            else:
                half = kernel.shape[0] // 2
                blurred = _kernels.convolve_full(delta, kernel)
                _add_patch(frame, blurred, y0 - half, x0 - half)
        if scene.noise_sigma > 0:
            rng = np.random.default_rng((seed, i))
            frame += rng.normal(0.0, scene.noise_sigma, frame.shape)
        frames.append(ThermalImage(frame))
    return FocalStack(tuple(frames)), gt, probes


# ---------------------------------------------------------------------------
# scene (de)serialization and the bundled two-object presets


def scene_to_dict(scene: SceneSpec) -> dict:
    d = {
        "width": scene.width,
        "height": scene.height,
        "background_temp": scene.background_temp,
        "frames": scene.frames,
        "blur_slope": scene.blur_slope,
        "max_blur_radius": scene.max_blur_radius,
        "noise_sigma": scene.noise_sigma,
        "objects": [],
    }
    if scene.background_temp_right is not None:
        d["background_temp_right"] = scene.background_temp_right
    for obj in scene.objects:
        o = {
            "shape": obj.shape,
            "cx": obj.cx,
            "cy": obj.cy,
            "temp": obj.temp,
            "focus_index": obj.focus_index,
        }
        if obj.shape == "disc":
            o["radius"] = obj.radius
        else:
            o["half_width"] = obj.half_width
            o["half_height"] = obj.half_height
        if obj.edge_drop is not None:
            o["edge_drop"] = obj.edge_drop
        d["objects"].append(o)
    return d


def scene_from_dict(d: dict) -> SceneSpec:
    try:
        objects = tuple(
            SceneObject(
                shape=o["shape"],
                cx=int(o["cx"]),
                cy=int(o["cy"]),
                temp=float(o["temp"]),
                focus_index=int(o["focus_index"]),
                radius=float(o.get("radius", 0.0)),
                half_width=float(o.get("half_width", 0.0)),
                half_height=float(o.get("half_height", 0.0)),
                edge_drop=None if o.get("edge_drop") is None else float(o["edge_drop"]),
            )
            for o in d["objects"]
        )
        scene = SceneSpec(
            width=int(d["width"]),
            height=int(d["height"]),
            background_temp=float(d["background_temp"]),
            frames=int(d["frames"]),
            blur_slope=float(d["blur_slope"]),
            objects=objects,
            noise_sigma=float(d.get("noise_sigma", 0.02)),
            max_blur_radius=float(d.get("max_blur_radius", 12.0)),
            background_temp_right=(
                None
                if d.get("background_temp_right") is None
                else float(d["background_temp_right"])
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidScene(f"bad scene description: {exc}") from exc
    validate_scene(scene)
    return scene


# (object temps, background, second background, disc?) of the six presets:
# two warm bodies, one focused near frame 20 and one near frame 70, over
# homogeneous or split backgrounds.
_PRESETS = {
    1: dict(temps=(41.2, 32.9), bg=22.0, bg2=None, disc=False),
    2: dict(temps=(39.4, 55.9), bg=22.0, bg2=None, disc=False),
    3: dict(temps=(51.7, 50.4), bg=21.0, bg2=25.0, disc=True),
    4: dict(temps=(43.3, 41.3), bg=27.0, bg2=None, disc=True),
    5: dict(temps=(57.0, 53.6), bg=27.0, bg2=None, disc=True),
    6: dict(temps=(57.9, 54.7), bg=19.0, bg2=None, disc=True),
}


def preset_scene(index: int) -> SceneSpec:
    """One of six bundled two-object scenes (96 frames, foci at 20 and 70)."""
    if index not in _PRESETS:
        raise InvalidScene(f"preset index must be 1..6, got {index}")
    p = _PRESETS[index]
    t1, t2 = p["temps"]
    if p["disc"]:
        objects = (
            SceneObject("disc", cx=46, cy=60, temp=t1, focus_index=20, radius=6.0),
            SceneObject("disc", cx=114, cy=60, temp=t2, focus_index=70, radius=6.0),
        )
    else:
        objects = (
            SceneObject("rect", cx=46, cy=60, temp=t1, focus_index=20,
                        half_width=7.0, half_height=10.0),
            SceneObject("rect", cx=114, cy=60, temp=t2, focus_index=70,
                        half_width=8.0, half_height=6.0),
        )
    return SceneSpec(
        width=160,
        height=120,
        background_temp=p["bg"],
        background_temp_right=p["bg2"],
        frames=96,
        blur_slope=0.6,
        objects=objects,
    )
