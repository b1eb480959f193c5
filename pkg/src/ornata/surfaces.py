"""Implicit surfaces and spherical-radius revolutions.

An ImplicitSurface is a formula F(x, y, z) with an axis-aligned box; its
geometry is the zero set of F inside the box.  Surfaces combine by formula
algebra (product unions zero sets, morph blends them), polygonize into
triangle meshes by marching cubes with an asymptotic decider on ambiguous
faces, and rasterize by orthographic ray marching.

A ParametricSurfaceDef instead gives a spherical radius rho(t, u) over
azimuth t and inclination u, the surface analogue of a polar curve.  The
golden ratio and the first twelve Fibonacci numbers are available inside
rho formulas as named constants (phi, fib1..fib12).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import expr as E
from .errors import EmptyZeroSetError, EvalDomainError, GeometryError

Interval = tuple[float, float]
Bounds = tuple[Interval, Interval, Interval]

DEFAULT_BOUNDS: Bounds = ((-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0))
DEFAULT_RESOLUTION = 64

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

_FIBONACCI = (1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144)

# Vocabulary usable in radial formulas alongside the angles t and u.
RADIAL_CONSTANTS = {"phi": GOLDEN_RATIO}
RADIAL_CONSTANTS.update({f"fib{i}": float(f) for i, f in enumerate(_FIBONACCI, 1)})


def _thread_count() -> int:
    """ORNATA_THREADS: 1 forces serial, 0/unset picks cpu count capped at 8."""
    raw = os.environ.get("ORNATA_THREADS", "").strip()
    try:
        n = int(raw) if raw else 0
    except ValueError:
        n = 0
    if n <= 0:
        return min(8, os.cpu_count() or 1)
    return n


def _check_bounds(bounds):
    out = []
    for axis, pair in zip("xyz", bounds):
        lo, hi = float(pair[0]), float(pair[1])
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            raise GeometryError(f"degenerate {axis} interval [{lo}, {hi}]")
        out.append((lo, hi))
    if len(tuple(bounds)) != 3:
        raise GeometryError("bounds must give three intervals")
    return tuple(out)


@dataclass(frozen=True)
class ImplicitSurface:
    """Zero set of f(x, y, z) clipped to an axis-aligned box."""

    f: E.Expr
    bounds: Bounds = DEFAULT_BOUNDS

    def __post_init__(self):
        object.__setattr__(self, "bounds", _check_bounds(self.bounds))
        extra = sorted(E.variables(self.f) - {"x", "y", "z"})
        if extra:
            raise GeometryError(f"formula uses unknown variables: {', '.join(extra)}")


def implicit(formula, bounds: Bounds = DEFAULT_BOUNDS) -> ImplicitSurface:
    f = E.parse(formula) if isinstance(formula, str) else formula
    return ImplicitSurface(f, bounds)


def combine(a: ImplicitSurface, b: ImplicitSurface, mode: str, s=None) -> ImplicitSurface:
    """product (union of zero sets), sum, or morph (1-s)*Fa + s*Fb."""
    inter = []
    for axis, (pa, pb) in zip("xyz", zip(a.bounds, b.bounds)):
        lo, hi = max(pa[0], pb[0]), min(pa[1], pb[1])
        if hi <= lo:
            raise GeometryError(f"bound intersection is degenerate on {axis}")
        inter.append((lo, hi))
    if mode == "product":
        f = E.Mul(a.f, b.f)
    elif mode == "sum":
        f = E.Add(a.f, b.f)
    elif mode == "morph":
        if s is None:
            raise GeometryError("morph needs a blend factor s")
        s = float(s)
        if not 0.0 <= s <= 1.0:
            raise GeometryError(f"blend factor {s} outside [0, 1]")
        f = E.Add(E.Mul(E.Num(1.0 - s), a.f), E.Mul(E.Num(s), b.f))
    else:
        raise GeometryError(f"unknown combine mode {mode!r}")
    return ImplicitSurface(f, tuple(inter))


# ---------------------------------------------------------------------------
# meshes

@dataclass(frozen=True, eq=False)
class TriMesh:
    """Triangle soup with shared vertices; treated as immutable.

    vertices: (V, 3) float64, triangles: (T, 3) int32, normals: (V, 3) or None.
    skipped_cells counts grid cells dropped for evaluation failures during
    polygonization.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    normals: np.ndarray | None = None
    skipped_cells: int = 0


def _triangle_cross(mesh: TriMesh) -> np.ndarray:
    v, t = mesh.vertices, mesh.triangles
    return np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])


def validate_mesh(mesh: TriMesh, require_closed: bool = False) -> None:
    """Raise GeometryError unless indices, areas and orientation are sound."""
    v, t = mesh.vertices, mesh.triangles
    if v.ndim != 2 or v.shape[1] != 3 or t.ndim != 2 or t.shape[1] != 3:
        raise GeometryError("mesh arrays have wrong shape")
    if len(t) and (t.min() < 0 or t.max() >= len(v)):
        raise GeometryError("triangle index out of range")
    if mesh.normals is not None and mesh.normals.shape != v.shape:
        raise GeometryError("normals shape does not match vertices")
    if len(t) == 0:
        return
    areas = 0.5 * np.linalg.norm(_triangle_cross(mesh), axis=1)
    if areas.min() <= 1e-12:
        raise GeometryError(f"degenerate triangle (area {areas.min():.3g})")
    directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    key = directed[:, 0].astype(np.int64) * len(v) + directed[:, 1]
    if len(np.unique(key)) != len(key):
        raise GeometryError("orientation inconsistent: a directed edge repeats")
    ukey = directed.min(axis=1).astype(np.int64) * len(v) + directed.max(axis=1)
    _, counts = np.unique(ukey, return_counts=True)
    if counts.max() > 2:
        raise GeometryError("non-manifold edge shared by more than two triangles")
    if require_closed and counts.min() < 2:
        raise GeometryError("mesh has boundary edges")


def euler_characteristic(mesh: TriMesh) -> int:
    t = mesh.triangles
    if len(t) == 0:
        return len(mesh.vertices)
    directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    ukey = directed.min(axis=1).astype(np.int64) * len(mesh.vertices) + directed.max(axis=1)
    edges = len(np.unique(ukey))
    return len(mesh.vertices) - edges + len(t)


def enclosed_volume(mesh: TriMesh) -> float:
    """Signed volume by the divergence theorem; positive for outward winding."""
    v, t = mesh.vertices, mesh.triangles
    return float(np.einsum("ij,ij->", v[t[:, 0]], np.cross(v[t[:, 1]], v[t[:, 2]]))) / 6.0


def _compact(verts, tris, normals=None):
    """Drop sliver triangles and the vertices nothing references."""
    if len(tris):
        cross = np.cross(verts[tris[:, 1]] - verts[tris[:, 0]],
                         verts[tris[:, 2]] - verts[tris[:, 0]])
        keep = 0.5 * np.linalg.norm(cross, axis=1) > 1e-12
        tris = tris[keep]
    used = np.unique(tris) if len(tris) else np.empty(0, dtype=tris.dtype)
    remap = np.full(len(verts), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    verts = verts[used]
    tris = remap[tris].astype(np.int32) if len(tris) else tris.astype(np.int32)
    if normals is not None:
        normals = normals[used]
    return verts, tris, normals


# ---------------------------------------------------------------------------
# polygonization

# Faces of a cell as (normal axis, side, in-face axis u, in-face axis v),
# chosen so that u cross v is the outward normal.
_FACES = (
    (0, 0, 2, 1),
    (0, 1, 1, 2),
    (1, 0, 0, 2),
    (1, 1, 2, 0),
    (2, 0, 1, 0),
    (2, 1, 0, 1),
)

_EDGE_MID = {"B": (0.5, 0.0), "T": (0.5, 1.0), "L": (0.0, 0.5), "R": (1.0, 0.5)}
_CORNER_UV = {"c00": (0.0, 0.0), "c10": (1.0, 0.0), "c01": (0.0, 1.0), "c11": (1.0, 1.0)}


def _face_geometry():
    """Per face: corner offsets (c00,c10,c01,c11) and edge (axis, offset) pairs."""
    geom = []
    for n, side, au, av in _FACES:
        def corner(u, v, n=n, side=side, au=au, av=av):
            off = [0, 0, 0]
            off[n] = side
            off[au] = u
            off[av] = v
            return tuple(off)

        corners = (corner(0, 0), corner(1, 0), corner(0, 1), corner(1, 1))
        edges = {
            "B": (au, corner(0, 0)),
            "T": (au, corner(0, 1)),
            "L": (av, corner(0, 0)),
            "R": (av, corner(1, 0)),
        }
        geom.append((corners, edges))
    return tuple(geom)


_FACE_GEOM = _face_geometry()

# Each face edge joins two face corners; segments cross where those signs differ.
_EDGE_ENDS = {"B": ("c00", "c10"), "R": ("c10", "c11"), "T": ("c01", "c11"), "L": ("c00", "c01")}
# Edges adjacent to a corner, for the two-segment saddle case.
_CORNER_EDGES = {"c00": ("B", "L"), "c10": ("B", "R"), "c01": ("T", "L"), "c11": ("T", "R")}


def _oriented(vid_a, mid_a, vid_b, mid_b, probe, probe_positive):
    # Walk the segment with the positive side of F on the left, measured in
    # the outward-oriented face plane; adjacent cells then disagree on
    # direction, which is exactly what consistent winding needs.
    du, dv = mid_b[0] - mid_a[0], mid_b[1] - mid_a[1]
    ru, rv = probe[0] - mid_a[0], probe[1] - mid_a[1]
    left = du * rv - dv * ru > 0.0
    return (vid_a, vid_b) if left == probe_positive else (vid_b, vid_a)


def _edge_roots(fn, p_lo, p_hi, sign_lo):
    """Bisect 20 times along each edge; brackets shrink to 2^-20 of the edge."""
    lo = np.zeros(len(p_lo))
    hi = np.ones(len(p_lo))
    delta = p_hi - p_lo
    for _ in range(20):
        tm = 0.5 * (lo + hi)
        pm = p_lo + delta * tm[:, None]
        vm = fn(pm[:, 0], pm[:, 1], pm[:, 2])
        same = np.where(np.isfinite(vm), vm >= 0.0, False) == sign_lo
        lo = np.where(same, tm, lo)
        hi = np.where(same, hi, tm)
    t = 0.5 * (lo + hi)
    return p_lo + delta * t[:, None]


def _cycles(segments):
    """Chain directed segments into closed loops; broken chains are dropped."""
    nxt = {}
    for a, b in segments:
        if a in nxt:  # exact-zero corner degeneracies; keep the first
            continue
        nxt[a] = b
    loops = []
    while nxt:
        start = min(nxt)
        path = [start]
        cur = nxt.pop(start)
        closed = True
        while cur != start:
            path.append(cur)
            if cur not in nxt:
                closed = False
                break
            cur = nxt.pop(cur)
        if closed and len(path) >= 3:
            loops.append(path)
    return loops


def _fan(path, avoid):
    # Root away from ambiguous-face vertices so two cells never pick the same
    # fan diagonal across their shared face.
    pool = [v for v in path if v not in avoid] or path
    root = min(pool)
    i = path.index(root)
    path = path[i:] + path[:i]
    return [(path[0], path[k], path[k + 1]) for k in range(1, len(path) - 1)]


def _gradient_at(f, fn, pts, spans):
    """Symbolic gradient rows; central differences where a partial fails."""
    if len(pts) == 0:
        return np.zeros((0, 3))
    grad = np.empty((len(pts), 3))
    for axis, name in enumerate("xyz"):
        gfn = E.compile_numpy(E.differentiate(f, name), ("x", "y", "z"))
        grad[:, axis] = gfn(pts[:, 0], pts[:, 1], pts[:, 2])
    bad = ~np.isfinite(grad)
    for axis in range(3):
        rows = np.nonzero(bad[:, axis])[0]
        if len(rows) == 0:
            continue
        h = 1e-6 * spans[axis]
        lo = pts[rows].copy()
        hi = pts[rows].copy()
        lo[:, axis] -= h
        hi[:, axis] += h
        grad[rows, axis] = (fn(hi[:, 0], hi[:, 1], hi[:, 2])
                            - fn(lo[:, 0], lo[:, 1], lo[:, 2])) / (2.0 * h)
    return grad


def polygonize(surf: ImplicitSurface, resolution: int | None = None) -> TriMesh:
    """Marching cubes over a resolution^3 grid; vertices sit on the zero set.

    Grid corner values of exactly zero count as positive, so zero sets lying
    on grid planes still close.  Ambiguous faces are settled by the sign of
    the bilinear saddle value, keeping adjacent cells crack free.  Cells whose
    corners fail to evaluate are skipped and counted on the result.
    """
    res = DEFAULT_RESOLUTION if resolution is None else int(resolution)
    if res < 8:
        raise GeometryError(f"resolution {res} below minimum 8")
    fn = E.compile_numpy(surf.f, ("x", "y", "z"))
    axes = [np.linspace(lo, hi, res + 1) for lo, hi in surf.bounds]
    grid = fn(axes[0][:, None, None], axes[1][None, :, None], axes[2][None, None, :])
    grid = np.broadcast_to(grid, (res + 1,) * 3)

    finite = np.isfinite(grid)
    sign = np.where(finite, grid >= 0.0, False)

    corner_ok = (finite[:-1, :-1, :-1] & finite[1:, :-1, :-1]
                 & finite[:-1, 1:, :-1] & finite[1:, 1:, :-1]
                 & finite[:-1, :-1, 1:] & finite[1:, :-1, 1:]
                 & finite[:-1, 1:, 1:] & finite[1:, 1:, 1:])
    skipped = int(corner_ok.size - corner_ok.sum())
    if not corner_ok.any():
        bad = np.argwhere(~finite)[0]
        point = {name: float(axes[k][bad[k]]) for k, name in enumerate("xyz")}
        try:
            E.evaluate(surf.f, point)
        except EvalDomainError as err:
            where = ", ".join(f"{k}={v:.9g}" for k, v in point.items())
            raise EvalDomainError(f"{err.op} at {where}", err.value) from None
        raise GeometryError("surface value is non-finite across the whole grid")

    cross = []
    vid = []
    verts = []
    base = 0
    for axis in range(3):
        sl_lo = [slice(None)] * 3
        sl_hi = [slice(None)] * 3
        sl_lo[axis] = slice(None, -1)
        sl_hi[axis] = slice(1, None)
        c = (finite[tuple(sl_lo)] & finite[tuple(sl_hi)]
             & (sign[tuple(sl_lo)] != sign[tuple(sl_hi)]))
        ids = np.full(c.shape, -1, dtype=np.int64)
        n = int(c.sum())
        ids[c] = np.arange(n) + base
        idx = np.argwhere(c)
        p_lo = np.stack([axes[k][idx[:, k]] for k in range(3)], axis=1)
        p_hi = p_lo.copy()
        p_hi[:, axis] = axes[axis][idx[:, axis] + 1]
        s_lo = sign[idx[:, 0], idx[:, 1], idx[:, 2]]
        verts.append(_edge_roots(fn, p_lo, p_hi, s_lo))
        cross.append(c)
        vid.append(ids)
        base += n

    if base == 0:
        extra = f" ({skipped} cells skipped on evaluation errors)" if skipped else ""
        raise EmptyZeroSetError(
            f"empty zero set: no sign change inside bounds at resolution {res}{extra}")
    vertices = np.concatenate(verts)

    cell_active = corner_ok.copy()
    hits = np.zeros_like(cell_active)
    for axis in range(3):
        c = cross[axis]
        sls = []
        for da in (0, 1):
            for db in (0, 1):
                sl = [slice(None, -1)] * 3
                sl[axis] = slice(None)
                other = [k for k in range(3) if k != axis]
                sl[other[0]] = slice(da, c.shape[other[0]] - 1 + da)
                sl[other[1]] = slice(db, c.shape[other[1]] - 1 + db)
                sls.append(c[tuple(sl)])
        hits |= sls[0] | sls[1] | sls[2] | sls[3]
    cell_active &= hits

    tris = []
    for ci, cj, ck in np.argwhere(cell_active):
        cell = (int(ci), int(cj), int(ck))
        segments = []
        double_verts = set()
        for corners, edges in _FACE_GEOM:
            g = {}
            s = {}
            for name, off in zip(("c00", "c10", "c01", "c11"), corners):
                val = grid[cell[0] + off[0], cell[1] + off[1], cell[2] + off[2]]
                g[name] = float(val)
                s[name] = bool(val >= 0.0)
            total = sum(s.values())
            if total in (0, 4):
                continue

            def edge_vid(name):
                axis, off = edges[name]
                return int(vid[axis][cell[0] + off[0], cell[1] + off[1], cell[2] + off[2]])

            crossing = [e for e, (a, b) in _EDGE_ENDS.items() if s[a] != s[b]]
            pieces = []
            if len(crossing) == 2:
                pieces.append((crossing[0], crossing[1], _CORNER_UV["c00"], s["c00"]))
            else:
                denom = g["c00"] + g["c11"] - g["c01"] - g["c10"]
                saddle = 0.0 if denom == 0.0 else (g["c00"] * g["c11"] - g["c01"] * g["c10"]) / denom
                connected_positive = saddle >= 0.0
                for name in ("c00", "c10", "c01", "c11"):
                    if s[name] != connected_positive:
                        ea, eb = _CORNER_EDGES[name]
                        pieces.append((ea, eb, _CORNER_UV[name], s[name]))
            for ea, eb, probe, pos in pieces:
                seg = _oriented(edge_vid(ea), _EDGE_MID[ea],
                                edge_vid(eb), _EDGE_MID[eb], probe, pos)
                segments.append(seg)
                if len(crossing) == 4:
                    double_verts.update(seg)
        for path in _cycles(segments):
            tris.extend(_fan(path, double_verts))

    triangles = np.asarray(tris, dtype=np.int64).reshape(-1, 3)
    vertices, triangles, _ = _compact(vertices, triangles)
    if len(triangles) == 0:
        extra = f" ({skipped} cells skipped on evaluation errors)" if skipped else ""
        raise EmptyZeroSetError(
            f"empty zero set: no sign change inside bounds at resolution {res}{extra}")

    spans = [hi - lo for lo, hi in surf.bounds]
    grad = _gradient_at(surf.f, fn, vertices, spans)
    norms = np.linalg.norm(grad, axis=1)
    ok = norms > 1e-30
    normals = np.where(ok[:, None], grad / np.where(ok, norms, 1.0)[:, None],
                       np.array([0.0, 0.0, 1.0]))
    bad = ~np.isfinite(normals).all(axis=1)
    normals[bad] = (0.0, 0.0, 1.0)

    mesh = TriMesh(vertices, triangles, normals, skipped)
    agreement = float((_triangle_cross(mesh) * normals[triangles].sum(axis=1)).sum())
    if agreement < 0.0:
        mesh = TriMesh(vertices, triangles[:, ::-1].copy(), normals, skipped)
    return mesh


# ---------------------------------------------------------------------------
# orthographic raster

# axis label -> (view axis, camera side sign, right axis/sign, up axis/sign);
# right x up always points back at the camera.
_CAMERAS = {
    "+x": (0, 1, (2, -1), (1, 1)),
    "-x": (0, -1, (2, 1), (1, 1)),
    "+y": (1, 1, (0, 1), (2, -1)),
    "-y": (1, -1, (0, 1), (2, 1)),
    "+z": (2, 1, (0, 1), (1, 1)),
    "-z": (2, -1, (0, -1), (1, 1)),
}

_RAY_STEPS = 256


def raster_render(surf: ImplicitSurface, axis: str = "+z",
                  width: int = 256, height: int = 256) -> np.ndarray:
    """Orthographic grayscale render: rows x cols array of Lambert shades in [0, 1].

    Each pixel marches a fixed 256-step ray across the bounds, bisects the
    first sign change to 1e-6 of the ray length, and shades by the angle
    between the ray and the surface gradient.  Background and failed rays
    are 0.
    """
    width, height = int(width), int(height)
    if width < 16 or height < 16:
        raise GeometryError(f"image {width}x{height} below minimum 16x16")
    key = axis if axis.startswith(("+", "-")) else "+" + axis
    if key not in _CAMERAS:
        raise GeometryError(f"unknown view axis {axis!r}")
    n_axis, n_sign, (r_axis, r_sign), (u_axis, u_sign) = _CAMERAS[key]

    fn = E.compile_numpy(surf.f, ("x", "y", "z"))
    spans = [hi - lo for lo, hi in surf.bounds]
    centers = [0.5 * (hi + lo) for lo, hi in surf.bounds]
    length = spans[n_axis]
    entry = surf.bounds[n_axis][1] if n_sign > 0 else surf.bounds[n_axis][0]
    direction = np.zeros(3)
    direction[n_axis] = -n_sign

    cols = centers[r_axis] + r_sign * spans[r_axis] * ((np.arange(width) + 0.5) / width - 0.5)
    rows_all = centers[u_axis] + u_sign * spans[u_axis] * (0.5 - (np.arange(height) + 0.5) / height)
    ts = np.linspace(0.0, length, _RAY_STEPS + 1)

    def march(row_lo, row_hi):
        rows = rows_all[row_lo:row_hi]
        shape = (len(rows), width)
        plane = [None, None, None]
        plane[r_axis] = np.broadcast_to(cols[None, :], shape)
        plane[u_axis] = np.broadcast_to(rows[:, None], shape)

        def value_at(t):
            coords = list(plane)
            coords[n_axis] = np.full(shape, entry - n_sign * t)
            return fn(coords[0], coords[1], coords[2])

        found = np.zeros(shape, dtype=bool)
        t_lo = np.zeros(shape)
        t_hi = np.zeros(shape)
        s_lo = np.zeros(shape, dtype=bool)
        prev = value_at(ts[0])
        for i in range(1, len(ts)):
            cur = value_at(ts[i])
            new = (~found & np.isfinite(prev) & np.isfinite(cur)
                   & ((prev >= 0.0) != (cur >= 0.0)))
            if new.any():
                t_lo[new] = ts[i - 1]
                t_hi[new] = ts[i]
                s_lo[new] = prev[new] >= 0.0
                found |= new
            prev = cur

        out = np.zeros(shape)
        hit_r, hit_c = np.nonzero(found)
        if len(hit_r) == 0:
            return out
        lo = t_lo[hit_r, hit_c]
        hi = t_hi[hit_r, hit_c]
        slo = s_lo[hit_r, hit_c]
        base = np.empty((len(hit_r), 3))
        base[:, r_axis] = plane[r_axis][hit_r, hit_c]
        base[:, u_axis] = plane[u_axis][hit_r, hit_c]
        # 12 halvings of a 1/256 bracket land within 1e-6 of the ray length
        for _ in range(12):
            tm = 0.5 * (lo + hi)
            base[:, n_axis] = entry - n_sign * tm
            vm = fn(base[:, 0], base[:, 1], base[:, 2])
            same = np.where(np.isfinite(vm), vm >= 0.0, False) == slo
            lo = np.where(same, tm, lo)
            hi = np.where(same, hi, tm)
        base[:, n_axis] = entry - n_sign * 0.5 * (lo + hi)

        grad = _gradient_at(surf.f, fn, base, spans)
        norm = np.linalg.norm(grad, axis=1)
        good = np.isfinite(norm) & (norm > 1e-30)
        shade = np.zeros(len(hit_r))
        shade[good] = np.abs(grad[good] @ direction) / norm[good]
        out[hit_r, hit_c] = np.clip(shade, 0.0, 1.0)
        return out

    threads = _thread_count()
    if threads == 1 or height < 64:
        return march(0, height)
    block = max(16, -(-height // threads))
    starts = list(range(0, height, block))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda s: march(s, min(s + block, height)), starts))
    return np.concatenate(parts, axis=0)


# ---------------------------------------------------------------------------
# spherical-radius revolution

@dataclass(frozen=True)
class ParametricSurfaceDef:
    """Radius formula rho(t, u): azimuth t around +z, inclination u from +z."""

    rho: E.Expr
    t0: float = 0.0
    t1: float = 2.0 * math.pi
    u0: float = 0.0
    u1: float = math.pi

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise GeometryError(f"azimuth interval [{self.t0}, {self.t1}] is degenerate")
        if not self.u1 > self.u0:
            raise GeometryError(f"inclination interval [{self.u0}, {self.u1}] is degenerate")
        extra = sorted(E.variables(self.rho) - {"t", "u"} - set(RADIAL_CONSTANTS))
        if extra:
            raise GeometryError(f"radius formula uses unknown variables: {', '.join(extra)}")


def radial(formula, t_range=(0.0, 2.0 * math.pi), u_range=(0.0, math.pi)) -> ParametricSurfaceDef:
    rho = E.parse(formula) if isinstance(formula, str) else formula
    return ParametricSurfaceDef(rho, float(t_range[0]), float(t_range[1]),
                                float(u_range[0]), float(u_range[1]))


_CONST_ORDER = tuple(sorted(RADIAL_CONSTANTS))


def revolve_radial(rdef: ParametricSurfaceDef, n_t: int = 64, n_u: int = 32) -> TriMesh:
    """Sample rho over the angle grid and stitch the quads into triangles.

    Negative radii land on the antipode, matching polar curves.  Coincident
    grid points weld (1e-9 buckets), which is what collapses pole rows into
    fans and closes the azimuth seam on a full revolution.
    """
    n_t, n_u = int(n_t), int(n_u)
    if n_t < 4 or n_u < 4:
        raise GeometryError("need at least 4 steps in each direction")
    fn = E.compile_numpy(rdef.rho, ("t", "u") + _CONST_ORDER)
    ts = rdef.t0 + np.arange(n_t + 1) * ((rdef.t1 - rdef.t0) / n_t)
    us = rdef.u0 + np.arange(n_u + 1) * ((rdef.u1 - rdef.u0) / n_u)
    shape = (n_u + 1, n_t + 1)
    tg = np.broadcast_to(ts[None, :], shape)
    ug = np.broadcast_to(us[:, None], shape)
    consts = [RADIAL_CONSTANTS[k] for k in _CONST_ORDER]
    rho = np.broadcast_to(fn(tg, ug, *consts), shape)

    bad = ~np.isfinite(rho)
    if bad.any():
        iu, it = np.argwhere(bad)[0]
        tv, uv = float(ts[it]), float(us[iu])
        env = {"t": tv, "u": uv, **RADIAL_CONSTANTS}
        try:
            E.evaluate(rdef.rho, env)
        except EvalDomainError as err:
            raise EvalDomainError(f"{err.op} at t={tv:.9g}, u={uv:.9g}", err.value) from None
        raise GeometryError(f"radius is non-finite at t={tv:.9g}, u={uv:.9g}")

    x = rho * np.sin(ug) * np.cos(tg)
    y = rho * np.sin(ug) * np.sin(tg)
    z = rho * np.cos(ug)
    if abs((rdef.t1 - rdef.t0) - 2.0 * math.pi) <= 1e-12:
        # exact seam: the wrapped column repeats the first one bitwise
        x[:, -1] = x[:, 0]
        y[:, -1] = y[:, 0]
        z[:, -1] = z[:, 0]

    pts = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)
    keys = np.round(pts * 1e9).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(first, kind="stable")
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    vid = rank[inverse]
    verts = pts[np.sort(first)]

    cols = n_t + 1
    r0 = np.repeat(np.arange(n_u), n_t)
    c0 = np.tile(np.arange(n_t), n_u)
    a = vid[r0 * cols + c0]
    b = vid[(r0 + 1) * cols + c0]
    c = vid[(r0 + 1) * cols + c0 + 1]
    d = vid[r0 * cols + c0 + 1]
    quads = np.stack([a, b, c, d], axis=1)
    t1 = quads[:, [0, 1, 2]]
    t2 = quads[:, [0, 2, 3]]
    tris = np.concatenate([t1, t2])
    distinct = ((tris[:, 0] != tris[:, 1]) & (tris[:, 1] != tris[:, 2])
                & (tris[:, 0] != tris[:, 2]))
    verts, tris, _ = _compact(verts, tris[distinct])
    if len(tris) == 0:
        raise GeometryError("revolution collapsed to nothing")
    return TriMesh(verts, tris)
