"""Turn design-document entries into geometry and matplotlib preview PNGs.

The render bundle is the batch counterpart of the studio: one PNG per
entry plus a manifest.csv describing what was drawn. Previews are plot
images for humans; the exact interchange formats live in export.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection

from . import curves as C
from . import stitch as St
from .stitch import StitchPattern
from .cmap import ComplexMap, map_curve
from .curves import CurveDef, PlaneCurve
from .errors import DesignError
from .export import DesignDoc, FrameSpec, RenderSettings, SolidSpec, StitchSpec, WarpSpec
from .frame import FrameLayout, layout_mesh, leonardo_bridge, leonardo_dome, strut_template
from .solids import Net, SolidMesh, build_solid, unfold_net
from .surfaces import (
    ImplicitSurface,
    ParametricSurfaceDef,
    TriMesh,
    polygonize,
    revolve_radial,
)

# metadata pins the PNG text chunks so repeated renders are byte-identical
_PNG_META = {"Software": "ornata"}


def realize(doc: DesignDoc, name: str):
    """Build the geometry behind one entry, honoring the doc's settings.

    Curves sample at render.samples points, surfaces polygonize on the
    render.resolution grid, warps resolve through their source chain.
    Plain map entries come back as the ComplexMap itself.
    """
    if name not in doc.entries:
        raise DesignError(f"references missing entry {name!r}", "entries")
    entry = doc.entries[name]
    st = doc.render
    if isinstance(entry, CurveDef):
        return C.sample(entry, st.samples)
    if isinstance(entry, WarpSpec):
        return map_curve(entry.map, realize(doc, entry.source))
    if isinstance(entry, ComplexMap):
        return entry
    if isinstance(entry, ImplicitSurface):
        return polygonize(entry, resolution=st.resolution)
    if isinstance(entry, ParametricSurfaceDef):
        return revolve_radial(entry, n_t=st.resolution, n_u=max(4, st.resolution // 2))
    if isinstance(entry, StitchSpec):
        if entry.kind == "two_rail":
            return St.two_rail_stitch(entry.rail_a, entry.rail_b, entry.n, entry.reverse)
        return St.circle_stitch(entry.pins, entry.step, entry.radius)
    if isinstance(entry, SolidSpec):
        solid = build_solid(entry.name)
        if entry.net:
            return unfold_net(solid, spanning=entry.spanning, tabs=entry.tabs)
        return solid
    strut = strut_template(entry.length, entry.width, entry.thickness)
    if entry.kind == "bridge":
        return leonardo_bridge(entry.n, strut, entry.span)
    return leonardo_dome(entry.rings, entry.segments, strut, entry.radius)


# ---------------------------------------------------------------------------
# previews


def _flat_axes(fig):
    ax = fig.add_subplot(111)
    ax.set_aspect("equal")
    ax.axis("off")
    return ax


def _draw_curve(fig, curve: PlaneCurve):
    xs = [p[0] for p in curve.points]
    ys = [p[1] for p in curve.points]
    _flat_axes(fig).plot(xs, ys, lw=1.2, color="#1a1a1a")


def _draw_map(fig, m: ComplexMap):
    # A map has no geometry of its own; show its image of a polar test grid.
    # The grid stays off the negative real axis, where power maps cut.
    ax = _flat_axes(fig)
    segs = []
    for k in range(9):
        ang = math.pi * (k / 4.0 - 1.0) * 0.98
        spoke = C.parametric(f"t * cos({ang})", f"t * sin({ang})", 0.2, 1.0)
        segs.append(map_curve(m, C.sample(spoke, 64)))
    for r in (0.2, 0.4, 0.6, 0.8, 1.0):
        ring = C.parametric(f"{r} * cos(t)", f"{r} * sin(t)", -math.pi * 0.98, math.pi * 0.98)
        segs.append(map_curve(m, C.sample(ring, 128)))
    ax.add_collection(
        LineCollection([list(c.points) for c in segs], colors="#1a1a1a", linewidths=0.8)
    )
    ax.autoscale_view()


def _draw_stitch(fig, pat: StitchPattern):
    ax = _flat_axes(fig)
    chords = [[pat.pins[a], pat.pins[b]] for a, b in pat.chords]
    ax.add_collection(LineCollection(chords, colors="#1a1a1a", linewidths=0.7))
    ax.scatter([p[0] for p in pat.pins], [p[1] for p in pat.pins], s=6, color="#1a1a1a")
    ax.autoscale_view()


def _draw_polys(fig, polys, folds=()):
    ax = _flat_axes(fig)
    closed = [list(poly) + [poly[0]] for poly in polys]
    ax.add_collection(LineCollection(closed, colors="#1a1a1a", linewidths=1.0))
    if folds:
        ax.add_collection(
            LineCollection(folds, colors="#777777", linewidths=0.8, linestyles="dashed")
        )
    ax.autoscale_view()


def _draw_mesh(fig, mesh: TriMesh):
    ax = fig.add_subplot(111, projection="3d")
    v, t = mesh.vertices, mesh.triangles
    ax.plot_trisurf(v[:, 0], v[:, 1], v[:, 2], triangles=t, color="#d8d8e8", edgecolor="#55556a", linewidth=0.2)
    ax.set_axis_off()
    span = v.max(axis=0) - v.min(axis=0)
    mid = (v.max(axis=0) + v.min(axis=0)) / 2
    r = max(float(span.max()) / 2, 1e-9)
    ax.set_xlim(mid[0] - r, mid[0] + r)
    ax.set_ylim(mid[1] - r, mid[1] + r)
    ax.set_zlim(mid[2] - r, mid[2] + r)


def preview(item, settings: RenderSettings = RenderSettings()) -> bytes:
    """PNG preview bytes for any realized entry."""
    dpi = 100.0
    fig = plt.figure(figsize=(settings.width / dpi, settings.height / dpi), dpi=dpi)
    try:
        if isinstance(item, PlaneCurve):
            _draw_curve(fig, item)
        elif isinstance(item, ComplexMap):
            _draw_map(fig, item)
        elif isinstance(item, StitchPattern):
            _draw_stitch(fig, item)
        elif isinstance(item, Net):
            _draw_polys(
                fig,
                [poly for _fid, poly in item.faces] + [poly for _fid, poly in item.tabs],
                folds=[list(edge) for _p, _c, edge in item.folds],
            )
        elif isinstance(item, (list, tuple)):
            _draw_polys(fig, item)
        elif isinstance(item, SolidMesh):
            _draw_mesh(fig, item.mesh)
        elif isinstance(item, FrameLayout):
            _draw_mesh(fig, layout_mesh(item))
        elif isinstance(item, TriMesh):
            _draw_mesh(fig, item)
        else:
            raise TypeError(f"cannot preview a {type(item).__name__}")
        if doc_view_applies(item, settings):
            ax = fig.axes[0]
            (xa, xb), (ya, yb) = settings.view
            ax.set_xlim(xa, xb)
            ax.set_ylim(ya, yb)
        buf = io.BytesIO()
        fig.savefig(buf, format="png", metadata=_PNG_META)
        return buf.getvalue()
    finally:
        plt.close(fig)


def doc_view_applies(item, settings) -> bool:
    return settings.view is not None and not isinstance(item, (TriMesh, SolidMesh, FrameLayout))


def _detail(item) -> str:
    if isinstance(item, PlaneCurve):
        return f"{len(item.points)} points"
    if isinstance(item, ComplexMap):
        return f"map {item.kind}"
    if isinstance(item, StitchPattern):
        return f"{len(item.pins)} pins, {len(item.chords)} chords"
    if isinstance(item, Net):
        return f"net of {len(item.faces)} faces, {len(item.folds)} folds"
    if isinstance(item, SolidMesh):
        return f"{len(item.faces)} faces, {len(item.mesh.vertices)} vertices"
    if isinstance(item, FrameLayout):
        return f"{item.kind} of {len(item.struts)} struts"
    if isinstance(item, TriMesh):
        return f"{len(item.vertices)} vertices, {len(item.triangles)} triangles"
    return type(item).__name__


def _worker_cap(threads: int) -> int:
    if threads < 0:
        raise DesignError(f"thread cap must be >= 0, got {threads}")
    return threads or min(8, os.cpu_count() or 1)


def render_bundle(doc: DesignDoc, out_dir, threads: int = 0) -> list:
    """Write <entry>.png per doc entry plus manifest.csv into out_dir.

    Geometry realization fans out on a thread pool (threads=0 picks a
    size); drawing stays on the calling thread because matplotlib is not
    thread-safe. Returns the manifest rows.
    """
    os.makedirs(out_dir, exist_ok=True)
    names = sorted(doc.entries)
    with ThreadPoolExecutor(max_workers=_worker_cap(threads)) as pool:
        realized = list(pool.map(lambda n: realize(doc, n), names))

    rows = []
    for name, item in zip(names, realized):
        png = preview(item, doc.render)
        fname = f"{name}.png"
        with open(os.path.join(out_dir, fname), "wb") as fh:
            fh.write(png)
        rows.append(
            {
                "entry": name,
                "type": _entry_tag(doc.entries[name]),
                "file": fname,
                "detail": _detail(item),
                "sha256": hashlib.sha256(png).hexdigest(),
            }
        )
    _write_manifest(os.path.join(out_dir, "manifest.csv"), rows)
    return rows


def _entry_tag(entry) -> str:
    if isinstance(entry, CurveDef):
        return "curve"
    if isinstance(entry, ComplexMap):
        return "map"
    if isinstance(entry, WarpSpec):
        return "warp"
    if isinstance(entry, ImplicitSurface):
        return "surface"
    if isinstance(entry, ParametricSurfaceDef):
        return "radial_surface"
    if isinstance(entry, StitchSpec):
        return "stitch"
    if isinstance(entry, SolidSpec):
        return "solid"
    return "frame"


def _write_manifest(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=("entry", "type", "file", "detail", "sha256"), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
