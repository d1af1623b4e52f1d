"""SVG pictures of the lamination and escape-time rasters of M_d."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .circle import Angle, format_angle
from .errors import TraceStalled
from .lamination import Lamination
from .numerics import default_escape_radius, escape_grid, trace_parameter_ray

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22",
)
MISIU_COLOR = "#444444"


def default_viewport(d: int) -> tuple[float, float, float, float]:
    if d == 2:
        return (-2.2, 0.8, -1.5, 1.5)
    r = 1.6 if d == 3 else 1.5
    return (-r, r, -r, r)


@dataclass
class RenderOptions:
    size: int = 800
    viewport: Optional[tuple[float, float, float, float]] = None  # re0, re1, im0, im1
    palette: Sequence[str] = PALETTE
    overlay_rays: Sequence[Angle] = ()
    stroke_width: float = 0.004
    geodesic: bool = True
    max_iter: int = 400
    ray_depth: int = 4
    ray_t_min: float = 1e-150

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("size must be positive")
        if self.viewport is not None:
            x0, x1, y0, y1 = self.viewport
            if not (x1 > x0 and y1 > y0):
                raise ValueError("degenerate viewport")


def _num(x: float) -> str:
    if abs(x) < 5e-10:
        x = 0.0
    return f"{x:.9g}"


def _point(theta: Fraction) -> tuple[float, float]:
    a = 2 * math.pi * float(theta)
    # SVG's y axis points down; flip it so angles run counterclockwise
    return math.cos(a), -math.sin(a)


def _geodesic(a: Fraction, b: Fraction, geodesic: bool) -> str:
    """Path segment from the point of ``a`` to that of ``b`` (move included)."""
    x1, y1 = _point(a)
    x2, y2 = _point(b)
    start = f"M {_num(x1)} {_num(y1)}"
    span = (b - a) % 1
    if not geodesic or span == Fraction(1, 2):
        return f"{start} L {_num(x2)} {_num(y2)}"
    half = math.pi * float(min(span, 1 - span))
    radius = math.tan(half)
    mid = 2 * math.pi * float(a + span / 2) if span < Fraction(1, 2) else 2 * math.pi * float(b + (1 - span) / 2)
    cx, cy = math.cos(mid) / math.cos(half), -math.sin(mid) / math.cos(half)
    cross = (x1 - cx) * (y2 - cy) - (y1 - cy) * (x2 - cx)
    sweep = 1 if cross > 0 else 0
    return f"{start} A {_num(radius)} {_num(radius)} 0 0 {sweep} {_num(x2)} {_num(y2)}"


def _tick(theta: Fraction, length: float = 0.05) -> str:
    x, y = _point(theta)
    return f"M {_num(x)} {_num(y)} L {_num(x * (1 + length))} {_num(y * (1 + length))}"


def lamination_svg(lam: Optional[Lamination], options: Optional[RenderOptions] = None) -> str:
    """Standalone SVG of the lamination in the closed unit disk.

    Root leaves are hyperbolic geodesics (diameters for antipodal pairs),
    Misiurewicz groups are geodesic polygons, and landing points of a single
    ray (the main component's degenerate leaf, co-roots, one-ray Misiurewicz
    groups) are drawn as boundary ticks.  Colors cycle through the palette by
    period.
    """
    opt = options or RenderOptions()
    w = _num(opt.stroke_width)
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.1 -1.1 2.2 2.2" '
        f'width="{opt.size}" height="{opt.size}">',
        f'<circle cx="0" cy="0" r="1" fill="none" stroke="#000000" stroke-width="{w}"/>',
    ]
    if lam is not None:
        for c in sorted(lam.components, key=lambda c: (c.period, c.lo)):
            color = opt.palette[(c.period - 1) % len(opt.palette)]
            if c is lam.main:
                d = _tick(c.lo)
            else:
                d = _geodesic(c.lo, c.hi, opt.geodesic)
            out.append(f'<path id="{c.id}" d="{d}" fill="none" stroke="{color}" stroke-width="{w}"/>')
            for k, a in enumerate(c.coroots):
                out.append(
                    f'<path id="{c.id}-co{k + 1}" d="{_tick(a, 0.03)}" fill="none" stroke="{color}" stroke-width="{w}"/>'
                )
        for m in sorted(lam.misiurewicz, key=lambda m: (m.preperiod, m.period, m.lo)):
            if len(m.angles) == 1:
                d = _tick(m.lo, 0.03)
                fill = "none"
            else:
                parts = []
                ring = list(m.angles) + [m.angles[0]]
                for i, (a, b) in enumerate(zip(ring, ring[1:])):
                    seg = _geodesic(a, b, opt.geodesic)
                    parts.append(seg if i == 0 else seg.split(" ", 3)[3])
                d = " ".join(parts) + " Z"
                fill = "#dddddd"
            out.append(f'<path id="{m.id}" d="{d}" fill="{fill}" stroke="{MISIU_COLOR}" stroke-width="{w}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


@dataclass
class RasterImage:
    pixels: np.ndarray  # (height, width, 3) uint8
    metadata: dict = field(default_factory=dict)
    rays: dict = field(default_factory=dict)  # angle -> polyline of complex points
    stalled: list = field(default_factory=list)

    def save(self, path: str) -> None:
        """Write PNG (or binary PPM when the name ends in ``.ppm``)."""
        if str(path).lower().endswith(".ppm"):
            write_ppm(path, self.pixels, self.metadata)
        else:
            write_png(path, self.pixels, self.metadata)


def _grid(viewport, size: int) -> tuple[np.ndarray, np.ndarray, float]:
    x0, x1, y0, y1 = viewport
    step = max(x1 - x0, y1 - y0) / size
    width = max(1, int(round((x1 - x0) / step)))
    height = max(1, int(round((y1 - y0) / step)))
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    # centered indices keep the grid exactly symmetric about its center
    re = cx + (np.arange(width) - (width - 1) / 2) * step
    im = cy - (np.arange(height) - (height - 1) / 2) * step
    return re, im, step


def _colorize(counts: np.ndarray) -> np.ndarray:
    img = np.zeros(counts.shape + (3,), dtype=np.uint8)
    esc = counts >= 0
    v = np.zeros(counts.shape)
    v[esc] = np.log1p(counts[esc])
    if esc.any():
        v[esc] /= v[esc].max()
    img[..., 0] = np.where(esc, 40 + 215 * v, 0)
    img[..., 1] = np.where(esc, 60 + 195 * v ** 0.5, 0)
    img[..., 2] = np.where(esc, 120 + 135 * v ** 0.3, 0)
    return img


def set_image(d: int, options: Optional[RenderOptions] = None) -> RasterImage:
    """Escape-time picture of M_d with traced rays drawn on top.

    Each overlay ray is drawn as its polyline of trace points followed by its
    landing estimate.  Rays whose trace stalls are drawn as far as they got
    and listed under ``stalled`` in the metadata.
    """
    opt = options or RenderOptions()
    viewport = opt.viewport or default_viewport(d)
    re, im, step = _grid(viewport, opt.size)
    corner = max(abs(complex(x, y)) for x in viewport[:2] for y in viewport[2:])
    r = default_escape_radius(corner, d)
    counts = escape_grid(re, im, d, opt.max_iter, r * r)
    pixels = _colorize(counts)
    rays, stalled = {}, []
    for a in opt.overlay_rays:
        a = Fraction(a)
        try:
            ray = trace_parameter_ray(d, a, opt.ray_depth, opt.ray_t_min)
            line = list(ray.points) + [ray.landing]
        except TraceStalled as exc:
            stalled.append(format_angle(a))
            line = list(exc.partial.points) if exc.partial is not None else []
        rays[a] = np.array(line, dtype=complex)
    if rays:
        pixels = _draw_rays(pixels, rays, re, im, step)
    meta = {
        "degree": str(d),
        "viewport": " ".join(_num(v) for v in viewport),
        "rays": ",".join(format_angle(Fraction(a)) for a in opt.overlay_rays),
    }
    if stalled:
        meta["stalled"] = ",".join(stalled)
    return RasterImage(pixels, meta, rays, stalled)


def to_pixel(z: complex, re: np.ndarray, im: np.ndarray, step: float) -> tuple[float, float]:
    """Continuous (column, row) coordinates of ``z`` in the grid."""
    return (z.real - re[0]) / step, (im[0] - z.imag) / step


def _draw_rays(pixels, rays, re, im, step):
    from PIL import Image, ImageDraw

    img = Image.fromarray(pixels)
    draw = ImageDraw.Draw(img)
    for line in rays.values():
        pts = [to_pixel(z, re, im, step) for z in line]
        pts = [(x, y) for x, y in pts if abs(x) < 1e6 and abs(y) < 1e6]
        if len(pts) > 1:
            draw.line(pts, fill=(255, 255, 0), width=1)
    return np.asarray(img).copy()


def write_png(path, pixels: np.ndarray, metadata: dict) -> None:
    from PIL import Image
    from PIL.PngImagePlugin import PngInfo

    info = PngInfo()
    for k, v in metadata.items():
        info.add_text(k, v)
    Image.fromarray(pixels).save(path, pnginfo=info)


def write_ppm(path, pixels: np.ndarray, metadata: dict) -> None:
    h, w, _ = pixels.shape
    header = "P6\n" + "".join(f"# {k}={v}\n" for k, v in metadata.items()) + f"{w} {h}\n255\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(pixels, dtype=np.uint8).tobytes())


def read_png_metadata(path) -> dict:
    from PIL import Image

    with Image.open(path) as img:
        return dict(img.text)
