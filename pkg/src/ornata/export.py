"""File formats: SVG and OBJ text, grayscale PNG bytes, JSON design documents.

Every emitter is deterministic byte for byte: fixed element and key order,
fixed float formatting, no timestamps.  Drawing coordinates are written with
six decimal places; design-document numbers keep Python's shortest
round-trip text so load_design(save_design(doc)) rebuilds the exact values.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from . import expr as E
from .cmap import ComplexMap
from .curves import CurveDef, PlaneCurve
from .errors import DesignError, GeometryError, OrnataError, ParseError
from .solids import Net, SOLID_NAMES
from .stitch import StitchPattern
from .surfaces import ImplicitSurface, ParametricSurfaceDef, TriMesh, validate_mesh

# The complete set of drawing elements any SVG from this module may contain.
SVG_ELEMENTS = ("polyline", "line", "circle", "polygon", "path")

_SOLID_NAMES = tuple(sorted(SOLID_NAMES.values()))


def _fmt(v: float) -> str:
    s = "%.6f" % float(v)
    return "0.000000" if s == "-0.000000" else s


# ---------------------------------------------------------------------------
# SVG


@dataclass(frozen=True)
class SvgStyle:
    """Drawing options. scale is drawing units per geometry unit; the pin
    radius and stroke width are in drawing units so templates print usably
    at any scale."""

    scale: float = 100.0
    stroke: str = "#1a1a1a"
    stroke_width: float = 1.0
    pin_radius: float = 2.5
    fold_dash: str = "6 4"


class _Sheet:
    """Collects drawing elements and the bounding box they cover.

    Geometry y points up, SVG y points down, so every point is flipped on
    the way in.
    """

    def __init__(self, style: SvgStyle):
        self.style = style
        self.parts = []
        self.drawn = 0
        self.lo = [math.inf, math.inf]
        self.hi = [-math.inf, -math.inf]

    def _see(self, x, y, pad=0.0):
        self.lo[0] = min(self.lo[0], x - pad)
        self.lo[1] = min(self.lo[1], y - pad)
        self.hi[0] = max(self.hi[0], x + pad)
        self.hi[1] = max(self.hi[1], y + pad)

    def _place(self, pts):
        s = self.style.scale
        out = []
        for p in pts:
            x, y = s * float(p[0]), -s * float(p[1])
            if not (math.isfinite(x) and math.isfinite(y)):
                raise GeometryError(f"non-finite coordinate {p!r}")
            self._see(x, y)
            out.append((x, y))
        return out

    def metadata(self, text: str):
        # Not a drawing element; carries the threading order for templates.
        self.parts.append(f"<metadata>{text}</metadata>")

    def polyline(self, pts):
        st = self.style
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in self._place(pts))
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{st.stroke}" '
            f'stroke-width="{_fmt(st.stroke_width)}"/>'
        )
        self.drawn += 1

    def line(self, p, q, cls=None):
        st = self.style
        (x1, y1), (x2, y2) = self._place((p, q))
        extra = ""
        if cls == "fold":
            extra = f' class="fold" stroke-dasharray="{st.fold_dash}"'
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{st.stroke}" stroke-width="{_fmt(st.stroke_width)}"{extra}/>'
        )
        self.drawn += 1

    def circle(self, c):
        st = self.style
        ((x, y),) = self._place((c,))
        self._see(x, y, pad=st.pin_radius)
        self.parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(st.pin_radius)}" '
            f'fill="{st.stroke}"/>'
        )
        self.drawn += 1

    def polygon(self, pts, cls=None):
        st = self.style
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in self._place(pts))
        extra = f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<polygon points="{coords}" fill="none" stroke="{st.stroke}" '
            f'stroke-width="{_fmt(st.stroke_width)}"{extra}/>'
        )
        self.drawn += 1

    def render(self) -> str:
        if not self.drawn:
            raise GeometryError("empty geometry: nothing to draw")
        w = self.hi[0] - self.lo[0]
        h = self.hi[1] - self.lo[1]
        pad = 0.05 * max(w, h)
        if pad == 0.0:
            pad = 1.0  # degenerate content still gets a visible box
        vb = (self.lo[0] - pad, self.lo[1] - pad, w + 2 * pad, h + 2 * pad)
        head = (
            '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'viewBox="{" ".join(_fmt(v) for v in vb)}">'
        )
        return "\n".join([head, *self.parts, "</svg>"]) + "\n"


def _tiling_polys(item):
    polys = []
    for poly in item:
        pts = tuple((float(p[0]), float(p[1])) for p in poly)
        if len(pts) < 3:
            raise GeometryError(f"tiling polygon needs at least 3 points, got {len(pts)}")
        polys.append(pts)
    return polys


def to_svg(item, style: SvgStyle | None = None) -> str:
    """SVG 1.1 text for a curve, stitch pattern, unfolded net, or tiling.

    Curves come out as one polyline, stitch chords as lines under pin
    circles, net faces as solid polygons with class "cut" over dashed fold
    lines with class "fold", tilings as one polygon per cell.
    """
    sheet = _Sheet(style or SvgStyle())
    if isinstance(item, PlaneCurve):
        sheet.polyline(item.points)
    elif isinstance(item, StitchPattern):
        order = " ".join("%d-%d" % (a, b) for a, b in item.chords)
        sheet.metadata(f"threading {order}")
        for a, b in item.chords:
            sheet.line(item.pins[a], item.pins[b])
        for pin in item.pins:
            sheet.circle(pin)
    elif isinstance(item, Net):
        for _pf, _cf, (p, q) in item.folds:
            sheet.line(p, q, cls="fold")
        for _fid, poly in item.faces:
            sheet.polygon(poly, cls="cut")
        for _fid, poly in item.tabs:
            sheet.polygon(poly, cls="cut")
    elif isinstance(item, (list, tuple)):
        for poly in _tiling_polys(item):
            sheet.polygon(poly)
    else:
        raise TypeError(f"cannot draw a {type(item).__name__}")
    return sheet.render()


# ---------------------------------------------------------------------------
# OBJ


def to_obj(mesh: TriMesh) -> str:
    """ASCII OBJ: v lines (vn lines when normals exist) then f lines.

    Indices are 1-based and vertex order is preserved, so reparsing gives
    back the same arrays to six decimal places.
    """
    validate_mesh(mesh)
    out = []
    for x, y, z in np.asarray(mesh.vertices, dtype=float):
        out.append(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}")
    has_normals = mesh.normals is not None
    if has_normals:
        for x, y, z in np.asarray(mesh.normals, dtype=float):
            out.append(f"vn {_fmt(x)} {_fmt(y)} {_fmt(z)}")
    for tri in np.asarray(mesh.triangles):
        a, b, c = (int(i) + 1 for i in tri)
        if has_normals:
            out.append(f"f {a}//{a} {b}//{b} {c}//{c}")
        else:
            out.append(f"f {a} {b} {c}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# PNG


def to_png(raster) -> bytes:
    """8-bit grayscale PNG from a rows x cols array of shades in [0, 1]."""
    a = np.asarray(raster, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise GeometryError(f"raster must be a non-empty 2-d array, got shape {a.shape}")
    data = np.round(np.clip(a, 0.0, 1.0) * 255.0).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(data, mode="L").save(buf, format="PNG")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Design document
#
# A document is a version tag, named entries, and shared render settings.
# Entries reuse the library's own definition types where one exists
# (CurveDef, ComplexMap, ImplicitSurface, ParametricSurfaceDef); stitch,
# solid, frame, and map-application entries get small spec records here.


def _point_tuple(pts, what="rail"):
    try:
        out = tuple((float(p[0]), float(p[1])) for p in pts)
    except (TypeError, ValueError, IndexError):
        raise DesignError(f"{what} must be a sequence of [x, y] points") from None
    return out


@dataclass(frozen=True)
class WarpSpec:
    """Apply a complex map to the curve produced by another entry."""

    source: str
    map: ComplexMap

    def __post_init__(self):
        if not isinstance(self.source, str) or not self.source:
            raise DesignError("warp source must name an entry")
        if not isinstance(self.map, ComplexMap):
            raise DesignError("warp map must be a ComplexMap")


@dataclass(frozen=True)
class StitchSpec:
    """Parameters for two_rail_stitch (kind "two_rail") or circle_stitch
    (kind "circle"); geometric feasibility is checked when the pattern is
    actually built."""

    kind: str
    rail_a: tuple = ()
    rail_b: tuple = ()
    n: int = 0
    reverse: bool = False
    pins: int = 0
    step: int = 0
    radius: float = 1.0

    def __post_init__(self):
        if self.kind == "two_rail":
            object.__setattr__(self, "rail_a", _point_tuple(self.rail_a, "rail_a"))
            object.__setattr__(self, "rail_b", _point_tuple(self.rail_b, "rail_b"))
            if self.n < 2:
                raise DesignError(f"two_rail stitch needs n >= 2, got {self.n}")
        elif self.kind == "circle":
            if self.pins < 3:
                raise DesignError(f"circle stitch needs at least 3 pins, got {self.pins}")
            if not 1 <= self.step < self.pins:
                raise DesignError(f"step {self.step} outside [1, {self.pins - 1}]")
        else:
            raise DesignError(f"unknown stitch kind {self.kind!r}")


@dataclass(frozen=True)
class SolidSpec:
    """A platonic solid by name, optionally unfolded into a net."""

    name: str
    net: bool = False
    spanning: str = "default"
    tabs: bool = False

    def __post_init__(self):
        if self.name not in _SOLID_NAMES:
            raise DesignError(
                f"unknown solid {self.name!r} (expected one of: {', '.join(_SOLID_NAMES)})"
            )


@dataclass(frozen=True)
class FrameSpec:
    """Reciprocal-frame parameters: kind "bridge" (n, span) or "dome"
    (rings, segments, radius), with one shared strut cross-section."""

    kind: str
    length: float
    width: float
    thickness: float
    n: int = 0
    span: float = 0.0
    rings: int = 0
    segments: int = 0
    radius: float = 0.0

    def __post_init__(self):
        if self.kind == "bridge":
            if self.n < 3:
                raise DesignError(f"a bridge needs at least 3 beams, got {self.n}")
        elif self.kind == "dome":
            if self.rings < 1 or self.segments < 1:
                raise DesignError("a dome needs rings >= 1 and segments >= 1")
        else:
            raise DesignError(f"unknown frame kind {self.kind!r}")


@dataclass(frozen=True)
class RenderSettings:
    """Shared knobs: raster size in pixels, mesh grid resolution, curve
    sample count, and an optional ((xlo, xhi), (ylo, yhi)) view window."""

    width: int = 1024
    height: int = 1024
    resolution: int = 64
    samples: int = 720
    view: tuple | None = None

    def __post_init__(self):
        for name in ("width", "height", "resolution", "samples"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
                raise DesignError(f"{name} must be a positive integer, got {v!r}")
        if self.view is not None:
            try:
                (xa, xb), (ya, yb) = self.view
                win = ((float(xa), float(xb)), (float(ya), float(yb)))
            except (TypeError, ValueError):
                raise DesignError("view must be ((xlo, xhi), (ylo, yhi))") from None
            if not (win[0][0] < win[0][1] and win[1][0] < win[1][1]):
                raise DesignError("view intervals must be increasing")
            object.__setattr__(self, "view", win)


_ENTRY_TYPES = (
    CurveDef,
    ComplexMap,
    WarpSpec,
    ImplicitSurface,
    ParametricSurfaceDef,
    StitchSpec,
    SolidSpec,
    FrameSpec,
)


def _check_refs(entries: dict):
    for name, entry in entries.items():
        if not isinstance(entry, WarpSpec):
            continue
        seen = [name]
        cur = entry
        while isinstance(cur, WarpSpec):
            src = cur.source
            if src not in entries:
                raise DesignError(
                    f"references missing entry {src!r}", f"entries.{seen[-1]}"
                )
            if src in seen:
                chain = " -> ".join(seen + [src])
                raise DesignError(f"circular reference: {chain}", f"entries.{name}")
            seen.append(src)
            cur = entries[src]
        if not isinstance(cur, CurveDef):
            raise DesignError(
                f"entry {seen[-1]!r} is not a curve and cannot be warped",
                f"entries.{name}",
            )


@dataclass(frozen=True)
class DesignDoc:
    """Named geometry definitions plus shared render settings."""

    entries: dict = field(default_factory=dict)
    render: RenderSettings = RenderSettings()
    version: int = 1

    def __post_init__(self):
        if self.version != 1 or isinstance(self.version, bool):
            raise DesignError(
                f"unsupported design version {self.version!r} (expected 1)", "version"
            )
        if not isinstance(self.render, RenderSettings):
            raise DesignError("render must be a RenderSettings", "render")
        for name, entry in self.entries.items():
            if not isinstance(name, str) or not name:
                raise DesignError(f"entry names must be non-empty strings, got {name!r}", "entries")
            if not isinstance(entry, _ENTRY_TYPES):
                raise DesignError(
                    f"unsupported entry type {type(entry).__name__}", f"entries.{name}"
                )
        _check_refs(self.entries)


# --- encoding


# Numeric fields are written as floats even when a doc was built with ints,
# so save(load(save(doc))) is byte-identical to save(doc).


def _map_json(m: ComplexMap) -> dict:
    if m.kind == "exp":
        return {"kind": "exp"}
    if m.kind == "recip_power":
        return {"kind": "recip_power", "alpha": float(m.alpha)}
    return {"kind": "compose", "outer": _map_json(m.outer), "inner": _map_json(m.inner)}


def _curve_json(c: CurveDef) -> dict:
    out = {"type": "curve", "kind": c.kind, "param": c.param, "t0": float(c.t0), "t1": float(c.t1)}
    if c.kind == "polar":
        out["radius"] = E.pretty_print(c.radius)
    elif c.kind == "parametric":
        out["x"] = E.pretty_print(c.x)
        out["y"] = E.pretty_print(c.y)
    else:
        out["b"] = float(c.b)
        if c.a is not None:
            out["a"] = float(c.a)
        if c.c is not None:
            out["c"] = float(c.c)
    return out


def _entry_json(entry) -> dict:
    if isinstance(entry, CurveDef):
        return _curve_json(entry)
    if isinstance(entry, ComplexMap):
        return {"type": "map", **_map_json(entry)}
    if isinstance(entry, WarpSpec):
        return {"type": "warp", "source": entry.source, "map": _map_json(entry.map)}
    if isinstance(entry, ImplicitSurface):
        return {
            "type": "surface",
            "formula": E.pretty_print(entry.f),
            "bounds": [[float(lo), float(hi)] for lo, hi in entry.bounds],
        }
    if isinstance(entry, ParametricSurfaceDef):
        return {
            "type": "radial_surface",
            "rho": E.pretty_print(entry.rho),
            "t0": float(entry.t0),
            "t1": float(entry.t1),
            "u0": float(entry.u0),
            "u1": float(entry.u1),
        }
    if isinstance(entry, StitchSpec):
        if entry.kind == "two_rail":
            return {
                "type": "stitch",
                "kind": "two_rail",
                "rail_a": [[float(x), float(y)] for x, y in entry.rail_a],
                "rail_b": [[float(x), float(y)] for x, y in entry.rail_b],
                "n": int(entry.n),
                "reverse": entry.reverse,
            }
        return {
            "type": "stitch",
            "kind": "circle",
            "pins": int(entry.pins),
            "step": int(entry.step),
            "radius": float(entry.radius),
        }
    if isinstance(entry, SolidSpec):
        return {
            "type": "solid",
            "name": entry.name,
            "net": entry.net,
            "spanning": entry.spanning,
            "tabs": entry.tabs,
        }
    out = {
        "type": "frame",
        "kind": entry.kind,
        "length": float(entry.length),
        "width": float(entry.width),
        "thickness": float(entry.thickness),
    }
    if entry.kind == "bridge":
        out["n"] = int(entry.n)
        out["span"] = float(entry.span)
    else:
        out["rings"] = int(entry.rings)
        out["segments"] = int(entry.segments)
        out["radius"] = float(entry.radius)
    return out


def _render_json(r: RenderSettings) -> dict:
    return {
        "width": r.width,
        "height": r.height,
        "resolution": r.resolution,
        "samples": r.samples,
        "view": None if r.view is None else [[float(lo), float(hi)] for lo, hi in r.view],
    }


def save_design(doc: DesignDoc) -> str:
    """Canonical JSON text: sorted keys, two-space indent, exact floats."""
    if not isinstance(doc, DesignDoc):
        raise DesignError(f"expected a DesignDoc, got {type(doc).__name__}")
    body = {
        "version": doc.version,
        "render": _render_json(doc.render),
        "entries": {name: _entry_json(e) for name, e in doc.entries.items()},
    }
    try:
        return json.dumps(body, indent=2, sort_keys=True, allow_nan=False) + "\n"
    except ValueError as err:
        raise DesignError("design contains a non-finite number") from err


# --- decoding


def _known(obj: dict, path: str, keys: tuple):
    for key in obj:
        if key not in keys:
            raise DesignError("unknown field", f"{path}.{key}" if path else key)


def _get(obj: dict, key: str, path: str, required=True, default=None):
    if key not in obj:
        if required:
            raise DesignError(f"missing field {key!r}", path)
        return default
    return obj[key]


def _num(obj, key, path, required=True, default=None):
    v = _get(obj, key, path, required, default)
    if v is None and not required:
        return default
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DesignError("must be a number", f"{path}.{key}")
    return float(v)


def _int(obj, key, path, required=True, default=None):
    v = _get(obj, key, path, required, default)
    if v is None and not required:
        return default
    if isinstance(v, bool) or not isinstance(v, int):
        raise DesignError("must be an integer", f"{path}.{key}")
    return v


def _bool(obj, key, path, required=True, default=None):
    v = _get(obj, key, path, required, default)
    if v is None and not required:
        return default
    if not isinstance(v, bool):
        raise DesignError("must be true or false", f"{path}.{key}")
    return v


def _str(obj, key, path, required=True, default=None):
    v = _get(obj, key, path, required, default)
    if v is None and not required:
        return default
    if not isinstance(v, str):
        raise DesignError("must be a string", f"{path}.{key}")
    return v


def _formula(obj, key, path):
    text = _str(obj, key, path)
    try:
        return E.parse(text)
    except ParseError as err:
        raise DesignError(f"bad formula {text!r}: {err}", f"{path}.{key}") from err


def _pairs(obj, key, path):
    v = _get(obj, key, path)
    if not isinstance(v, list):
        raise DesignError("must be a list of [x, y] points", f"{path}.{key}")
    out = []
    for p in v:
        ok = (
            isinstance(p, list)
            and len(p) == 2
            and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in p)
        )
        if not ok:
            raise DesignError("must be a list of [x, y] points", f"{path}.{key}")
        out.append((float(p[0]), float(p[1])))
    return tuple(out)


def _wrap(path, fn, *args, **kwargs):
    # Constructor errors become schema errors anchored at the entry's path.
    try:
        return fn(*args, **kwargs)
    except DesignError:
        raise
    except OrnataError as err:
        raise DesignError(str(err), path) from err


def _load_curve(obj, path):
    kind = _str(obj, "kind", path)
    common = ("type", "kind", "param", "t0", "t1")
    param = _str(obj, "param", path, required=False, default="t")
    t0 = _num(obj, "t0", path)
    t1 = _num(obj, "t1", path)
    if kind == "polar":
        _known(obj, path, common + ("radius",))
        radius = _formula(obj, "radius", path)
        return _wrap(path, CurveDef, kind="polar", t0=t0, t1=t1, param=param, radius=radius)
    if kind == "parametric":
        _known(obj, path, common + ("x", "y"))
        x = _formula(obj, "x", path)
        y = _formula(obj, "y", path)
        return _wrap(path, CurveDef, kind="parametric", t0=t0, t1=t1, param=param, x=x, y=y)
    if kind == "hypocycloid":
        _known(obj, path, common + ("a", "b", "c"))
        a = _num(obj, "a", path, required=False)
        b = _num(obj, "b", path)
        c = _num(obj, "c", path, required=False)
        return _wrap(path, CurveDef, kind="hypocycloid", t0=t0, t1=t1, param=param, a=a, b=b, c=c)
    raise DesignError(f"unknown curve kind {kind!r}", path)


def _load_map_value(obj, path, entry=False):
    if not isinstance(obj, dict):
        raise DesignError("map must be an object", path)
    kind = _str(obj, "kind", path)
    head = ("type", "kind") if entry else ("kind",)
    if kind == "exp":
        _known(obj, path, head)
        return ComplexMap("exp")
    if kind == "recip_power":
        _known(obj, path, head + ("alpha",))
        alpha = _num(obj, "alpha", path)
        return _wrap(path, ComplexMap, "recip_power", alpha=alpha)
    if kind == "compose":
        _known(obj, path, head + ("outer", "inner"))
        outer = _load_map_value(_get(obj, "outer", path), f"{path}.outer")
        inner = _load_map_value(_get(obj, "inner", path), f"{path}.inner")
        return ComplexMap("compose", inner=inner, outer=outer)
    raise DesignError(f"unknown map kind {kind!r}", path)


def _load_map(obj, path):
    return _load_map_value(obj, path, entry=True)


def _load_warp(obj, path):
    _known(obj, path, ("type", "source", "map"))
    source = _str(obj, "source", path)
    m = _load_map_value(_get(obj, "map", path), f"{path}.map")
    return _wrap(path, WarpSpec, source=source, map=m)


def _load_surface(obj, path):
    _known(obj, path, ("type", "formula", "bounds"))
    f = _formula(obj, "formula", path)
    v = _get(obj, "bounds", path)
    ok = isinstance(v, list) and len(v) == 3
    if ok:
        for axis in v:
            ok = ok and (
                isinstance(axis, list)
                and len(axis) == 2
                and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in axis)
            )
    if not ok:
        raise DesignError("must be three [lo, hi] pairs", f"{path}.bounds")
    bounds = tuple((float(lo), float(hi)) for lo, hi in v)
    return _wrap(path, ImplicitSurface, f, bounds)


def _load_radial(obj, path):
    _known(obj, path, ("type", "rho", "t0", "t1", "u0", "u1"))
    rho = _formula(obj, "rho", path)
    return _wrap(
        path,
        ParametricSurfaceDef,
        rho,
        _num(obj, "t0", path),
        _num(obj, "t1", path),
        _num(obj, "u0", path),
        _num(obj, "u1", path),
    )


def _load_stitch(obj, path):
    kind = _str(obj, "kind", path)
    if kind == "two_rail":
        _known(obj, path, ("type", "kind", "rail_a", "rail_b", "n", "reverse"))
        return _wrap(
            path,
            StitchSpec,
            kind="two_rail",
            rail_a=_pairs(obj, "rail_a", path),
            rail_b=_pairs(obj, "rail_b", path),
            n=_int(obj, "n", path),
            reverse=_bool(obj, "reverse", path, required=False, default=False),
        )
    if kind == "circle":
        _known(obj, path, ("type", "kind", "pins", "step", "radius"))
        return _wrap(
            path,
            StitchSpec,
            kind="circle",
            pins=_int(obj, "pins", path),
            step=_int(obj, "step", path),
            radius=_num(obj, "radius", path, required=False, default=1.0),
        )
    raise DesignError(f"unknown stitch kind {kind!r}", path)


def _load_solid(obj, path):
    _known(obj, path, ("type", "name", "net", "spanning", "tabs"))
    return _wrap(
        path,
        SolidSpec,
        name=_str(obj, "name", path),
        net=_bool(obj, "net", path, required=False, default=False),
        spanning=_str(obj, "spanning", path, required=False, default="default"),
        tabs=_bool(obj, "tabs", path, required=False, default=False),
    )


def _load_frame(obj, path):
    kind = _str(obj, "kind", path)
    dims = {
        "length": _num(obj, "length", path),
        "width": _num(obj, "width", path),
        "thickness": _num(obj, "thickness", path),
    }
    if kind == "bridge":
        _known(obj, path, ("type", "kind", "length", "width", "thickness", "n", "span"))
        return _wrap(
            path, FrameSpec, kind="bridge", n=_int(obj, "n", path),
            span=_num(obj, "span", path), **dims,
        )
    if kind == "dome":
        _known(
            obj, path,
            ("type", "kind", "length", "width", "thickness", "rings", "segments", "radius"),
        )
        return _wrap(
            path, FrameSpec, kind="dome", rings=_int(obj, "rings", path),
            segments=_int(obj, "segments", path), radius=_num(obj, "radius", path), **dims,
        )
    raise DesignError(f"unknown frame kind {kind!r}", path)


_LOADERS = {
    "curve": _load_curve,
    "map": _load_map,
    "warp": _load_warp,
    "surface": _load_surface,
    "radial_surface": _load_radial,
    "stitch": _load_stitch,
    "solid": _load_solid,
    "frame": _load_frame,
}


def _load_render(obj, path):
    if not isinstance(obj, dict):
        raise DesignError("render must be an object", path)
    _known(obj, path, ("width", "height", "resolution", "samples", "view"))
    defaults = RenderSettings()
    view = obj.get("view")
    if view is not None:
        ok = isinstance(view, list) and len(view) == 2
        if ok:
            for axis in view:
                ok = ok and (
                    isinstance(axis, list)
                    and len(axis) == 2
                    and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in axis)
                )
        if not ok:
            raise DesignError("must be [[xlo, xhi], [ylo, yhi]] or null", f"{path}.view")
        view = tuple((float(lo), float(hi)) for lo, hi in view)
    return _wrap(
        path,
        RenderSettings,
        width=_int(obj, "width", path, required=False, default=defaults.width),
        height=_int(obj, "height", path, required=False, default=defaults.height),
        resolution=_int(obj, "resolution", path, required=False, default=defaults.resolution),
        samples=_int(obj, "samples", path, required=False, default=defaults.samples),
        view=view,
    )


def _no_nonfinite(token):
    raise DesignError(f"non-finite number {token} is not allowed")


def load_design(text: str) -> DesignDoc:
    """Parse and validate design JSON; inverse of save_design."""
    try:
        body = json.loads(text, parse_constant=_no_nonfinite)
    except json.JSONDecodeError as err:
        raise DesignError(f"not valid JSON: {err}") from err
    if not isinstance(body, dict):
        raise DesignError("design must be a JSON object")
    _known(body, "", ("version", "entries", "render"))
    version = _get(body, "version", "version")
    if isinstance(version, bool) or version != 1:
        raise DesignError(f"unsupported design version {version!r} (expected 1)", "version")

    render_obj = _get(body, "render", "", required=False, default=None)
    render = RenderSettings() if render_obj is None else _load_render(render_obj, "render")

    entries_obj = _get(body, "entries", "", required=False, default={})
    if not isinstance(entries_obj, dict):
        raise DesignError("entries must be an object", "entries")
    entries = {}
    for name, obj in entries_obj.items():
        path = f"entries.{name}"
        if not isinstance(obj, dict):
            raise DesignError("entry must be an object", path)
        t = _str(obj, "type", path)
        loader = _LOADERS.get(t)
        if loader is None:
            known = ", ".join(sorted(_LOADERS))
            raise DesignError(f"unknown entry type {t!r} (expected one of: {known})", path)
        entries[name] = loader(obj, path)
    return _wrap("", DesignDoc, entries=entries, render=render)
