"""Platonic solids, unfoldings, face elevations, and regular tilings."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from .errors import GeometryError
from .surfaces import GOLDEN_RATIO, TriMesh, validate_mesh

UNIT_TOL = 1e-9
PLANAR_TOL = 1e-9
OVERLAP_AREA_TOL = 1e-9
TAB_WIDTH_RATIO = 0.1


@dataclass(frozen=True, order=True)
class SchlafliPair:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 3 or self.q < 3:
            raise GeometryError(f"Schlafli symbol ({self.p}, {self.q}) needs p, q >= 3")


SOLID_NAMES = {
    SchlafliPair(3, 3): "tetrahedron",
    SchlafliPair(3, 4): "octahedron",
    SchlafliPair(3, 5): "icosahedron",
    SchlafliPair(4, 3): "cube",
    SchlafliPair(5, 3): "dodecahedron",
}

_NAME_TO_PAIR = {name: pair for pair, name in SOLID_NAMES.items()}


def enumerate_platonic():
    """All (p, q) whose q corner angles leave a positive deficit at a vertex."""
    found = []
    for p in range(3, 21):
        for q in range(3, 21):
            if q * (180.0 * (p - 2) / p) < 360.0:
                found.append(SchlafliPair(p, q))
    return tuple(found)


# Raw vertex tables, centered at the origin, edge length normalized later.
_PHI = GOLDEN_RATIO


def _raw_vertices(pair):
    p, q = pair.p, pair.q
    if (p, q) == (3, 3):
        return [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    if (p, q) == (3, 4):
        return [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    if (p, q) == (4, 3):
        return [(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    if (p, q) == (3, 5):
        vs = []
        for a in (-1, 1):
            for b in (-_PHI, _PHI):
                vs += [(0, a, b), (a, b, 0), (b, 0, a)]
        return vs
    if (p, q) == (5, 3):
        vs = [(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
        inv = 1.0 / _PHI
        for a in (-inv, inv):
            for b in (-_PHI, _PHI):
                vs += [(0, a, b), (a, b, 0), (b, 0, a)]
        return vs
    raise GeometryError(f"({p}, {q}) is not a platonic symbol")


def _rotation_to_z(v):
    # Rodrigues rotation taking unit vector v onto +z.
    z = np.array([0.0, 0.0, 1.0])
    axis = np.cross(v, z)
    s = np.linalg.norm(axis)
    c = float(np.dot(v, z))
    if s < 1e-15:
        if c > 0:
            return np.eye(3)
        return np.diag([1.0, -1.0, -1.0])  # half turn about x
    axis = axis / s
    k = np.array([
        [0.0, -axis[2], axis[1]],
        [axis[2], 0.0, -axis[0]],
        [-axis[1], axis[0], 0.0],
    ])
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


def _canonical_vertices(pair):
    pts = np.array(_raw_vertices(pair), dtype=float)
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    edge = d[d > 1e-12].min()
    pts /= edge
    if (pair.p, pair.q) == (4, 3):
        return pts  # already axis-aligned
    # Rotate a chosen vertex onto +z, then zero the azimuth of a chosen neighbor.
    order = np.lexsort((pts[:, 0], pts[:, 1], pts[:, 2]))
    top = order[-1]
    radius = np.linalg.norm(pts[top])
    pts = pts @ _rotation_to_z(pts[top] / radius).T
    dist = np.linalg.norm(pts - pts[top], axis=1)
    nbr = np.where(np.abs(dist - 1.0) < 1e-9)[0]
    nb = pts[nbr]
    pick = nbr[np.lexsort((nb[:, 0], nb[:, 1], nb[:, 2]))[-1]]
    ang = math.atan2(pts[pick, 1], pts[pick, 0])
    ca, sa = math.cos(-ang), math.sin(-ang)
    rz = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    return pts @ rz.T


@dataclass(frozen=True, eq=False)
class SolidMesh:
    """Triangulated solid that remembers its polygonal faces.

    faces holds one vertex-id cycle per flat face, counterclockwise seen
    from outside; face_triangles maps each face to its fan in mesh.triangles.
    """

    mesh: TriMesh
    faces: tuple
    face_triangles: tuple
    pair: SchlafliPair | None = None


def _merge_hull_faces(verts):
    hull = ConvexHull(verts)
    groups = {}
    for simplex, eq in zip(hull.simplices, hull.equations):
        key = tuple(np.round(eq, 7))
        groups.setdefault(key, set()).update(int(i) for i in simplex)
    cycles = []
    for eq, ids in groups.items():
        normal = np.array(eq[:3])
        ids = sorted(ids)
        pts = verts[ids]
        center = pts.mean(axis=0)
        u = pts[0] - center
        u /= np.linalg.norm(u)
        w = np.cross(normal, u)
        ang = np.arctan2((pts - center) @ w, (pts - center) @ u)
        cyc = [ids[k] for k in np.argsort(ang)]
        start = cyc.index(min(cyc))
        cycles.append(tuple(cyc[start:] + cyc[:start]))
    centers = [np.round(verts[list(c)].mean(axis=0), 9) for c in cycles]
    order = sorted(range(len(cycles)), key=lambda i: tuple(centers[i]))
    return tuple(cycles[i] for i in order)


def _assemble(verts, cycles, pair=None):
    tris = []
    fans = []
    for cyc in cycles:
        first = len(tris)
        for k in range(1, len(cyc) - 1):
            tris.append((cyc[0], cyc[k], cyc[k + 1]))
        fans.append(tuple(range(first, len(tris))))
    mesh = TriMesh(
        vertices=np.ascontiguousarray(verts, dtype=float),
        triangles=np.array(tris, dtype=np.int64),
    )
    return SolidMesh(mesh=mesh, faces=tuple(cycles), face_triangles=tuple(fans), pair=pair)


def build_solid(which):
    """Unit-edge platonic solid centered at the origin.

    The cube comes out axis-aligned; every other solid has a vertex on +z.
    Accepts a SchlafliPair, a (p, q) tuple, or a name like "cube".
    """
    if isinstance(which, str):
        if which not in _NAME_TO_PAIR:
            known = ", ".join(sorted(_NAME_TO_PAIR))
            raise GeometryError(f"unknown solid {which!r} (expected one of: {known})")
        pair = _NAME_TO_PAIR[which]
    elif isinstance(which, SchlafliPair):
        pair = which
    else:
        pair = SchlafliPair(int(which[0]), int(which[1]))
    if pair not in SOLID_NAMES:
        raise GeometryError(f"({pair.p}, {pair.q}) is not a platonic symbol")
    verts = _canonical_vertices(pair)
    cycles = _merge_hull_faces(verts)
    return _assemble(verts, cycles, pair)


def counts(solid):
    """(V, E, F) of the polygonal face structure, not the triangulation."""
    edges = set()
    for cyc in solid.faces:
        for i in range(len(cyc)):
            a, b = cyc[i], cyc[(i + 1) % len(cyc)]
            edges.add((min(a, b), max(a, b)))
    return len(solid.mesh.vertices), len(edges), len(solid.faces)


def validate_solid(solid, require_closed=True):
    validate_mesh(solid.mesh, require_closed=require_closed)
    verts = solid.mesh.vertices
    for fid, cyc in enumerate(solid.faces):
        pts = verts[list(cyc)]
        center = pts.mean(axis=0)
        normal = _newell(pts)
        flat = np.abs((pts - center) @ normal).max()
        if flat > PLANAR_TOL:
            raise GeometryError(f"face {fid} deviates from planar by {flat:.3e}")
        for i in range(len(cyc)):
            e = np.linalg.norm(verts[cyc[(i + 1) % len(cyc)]] - verts[cyc[i]])
            if abs(e - 1.0) > UNIT_TOL:
                raise GeometryError(f"face {fid} has edge of length {e!r}, expected 1")
    return solid


def _newell(pts):
    n = np.zeros(3)
    for i in range(len(pts)):
        a, b = pts[i], pts[(i + 1) % len(pts)]
        n += np.cross(a, b)
    return n / np.linalg.norm(n)


# ---------------------------------------------------------------------------
# Unfolding.


@dataclass(frozen=True)
class Net:
    """Flat layout of a solid: placed faces, fold edges, optional glue tabs.

    faces: (face id, ((x, y), ...)) per placed polygon.
    folds: (parent face, child face, ((x1, y1), (x2, y2))) per tree edge.
    collision is the first overlapping face pair when valid is False.
    """

    faces: tuple
    folds: tuple
    tabs: tuple = ()
    valid: bool = True
    collision: tuple | None = None


def _edge_map(solid):
    owners = {}
    for fid, cyc in enumerate(solid.faces):
        for i in range(len(cyc)):
            a, b = cyc[i], cyc[(i + 1) % len(cyc)]
            owners.setdefault(frozenset((a, b)), []).append(fid)
    return owners


def _neighbors(solid):
    owners = _edge_map(solid)
    nbrs = {fid: {} for fid in range(len(solid.faces))}
    for edge, fids in owners.items():
        if len(fids) != 2:
            raise GeometryError("cannot unfold an open solid")
        a, b = fids
        nbrs[a][b] = edge
        nbrs[b][a] = edge
    return nbrs


def _bfs_tree(nbrs, root=0):
    seen = {root}
    tree = []
    queue = deque([root])
    while queue:
        f = queue.popleft()
        for g in sorted(nbrs[f]):
            if g not in seen:
                seen.add(g)
                tree.append((f, g))
                queue.append(g)
    return tree


def _check_spanning(pairs, nbrs, n_faces):
    if len(pairs) != n_faces - 1:
        raise GeometryError(f"spanning list has {len(pairs)} edges, expected {n_faces - 1}")
    children = [c for _, c in pairs]
    if len(set(children)) != len(children):
        raise GeometryError("spanning list attaches some face twice")
    roots = set(range(n_faces)) - set(children)
    if len(roots) != 1:
        raise GeometryError("spanning list must leave exactly one root face")
    root = roots.pop()
    placed = {root}
    for par, ch in pairs:
        if par not in placed:
            raise GeometryError(f"face {par} used as parent before being placed")
        if ch not in nbrs[par]:
            raise GeometryError(f"faces {par} and {ch} share no edge")
        placed.add(ch)
    return root


def _flatten_face(verts, cyc, origin_id, toward_id):
    """2D coordinates of a face cycle in its own plane, CCW preserved."""
    pts = verts[list(cyc)]
    a = verts[origin_id]
    xh = verts[toward_id] - a
    xh = xh / np.linalg.norm(xh)
    yh = np.cross(_newell(pts), xh)
    return {vid: (float((verts[vid] - a) @ xh), float((verts[vid] - a) @ yh)) for vid in cyc}


def _clip_area(subject, clip):
    # Sutherland-Hodgman on convex CCW polygons, then shoelace.
    poly = [tuple(p) for p in subject]
    for i in range(len(clip)):
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % len(clip)]
        ex, ey = bx - ax, by - ay
        out = []
        for j in range(len(poly)):
            px, py = poly[j]
            qx, qy = poly[(j + 1) % len(poly)]
            sp = ex * (py - ay) - ey * (px - ax)
            sq = ex * (qy - ay) - ey * (qx - ax)
            if sp >= -1e-12:
                out.append((px, py))
            if (sp > 1e-12 and sq < -1e-12) or (sp < -1e-12 and sq > 1e-12):
                t = sp / (sp - sq)
                out.append((px + t * (qx - px), py + t * (qy - py)))
        poly = out
        if not poly:
            return 0.0
    area = 0.0
    for j in range(len(poly)):
        px, py = poly[j]
        qx, qy = poly[(j + 1) % len(poly)]
        area += px * qy - py * qx
    return abs(area) / 2.0


def unfold_net(solid, spanning="default", tabs=False):
    """Unfold a closed solid into the plane along a spanning tree of faces.

    spanning may be a preset name ("default" breadth-first from face 0,
    "cross" for the cube, "dress" for the dodecahedron) or an explicit
    sequence of (parent face, child face) pairs listed parents-first.
    Preset layouts are overlap-free; a user-supplied tree that makes two
    faces overlap yields a net flagged invalid with the colliding pair.
    """
    nbrs = _neighbors(solid)
    n_faces = len(solid.faces)
    user_tree = not isinstance(spanning, str)
    if user_tree:
        pairs = [(int(p), int(c)) for p, c in spanning]
        root = _check_spanning(pairs, nbrs, n_faces)
    else:
        if spanning not in ("default", "bfs", "cross", "dress"):
            raise GeometryError(f"unknown unfolding strategy {spanning!r}")
        pairs = _bfs_tree(nbrs)
        root = 0

    verts = solid.mesh.vertices
    placed = {}
    root_cyc = solid.faces[root]
    placed[root] = _flatten_face(verts, root_cyc, root_cyc[0], root_cyc[1])
    folds = []
    for par, ch in pairs:
        edge = nbrs[par][ch]
        cyc_p = solid.faces[par]
        # Orient the shared edge as the parent cycle walks it.
        for i in range(len(cyc_p)):
            a, b = cyc_p[i], cyc_p[(i + 1) % len(cyc_p)]
            if frozenset((a, b)) == edge:
                break
        a2 = np.array(placed[par][a])
        b2 = np.array(placed[par][b])
        local = _flatten_face(verts, solid.faces[ch], a, b)
        eh = b2 - a2
        eh /= np.linalg.norm(eh)
        nh = np.array([-eh[1], eh[0]])
        coords = {}
        for vid, (u, v) in local.items():
            q = a2 + u * eh + v * nh
            coords[vid] = (float(q[0]), float(q[1]))
        placed[ch] = coords
        folds.append((par, ch, (tuple(np.round(a2, 15)), tuple(np.round(b2, 15)))))

    face_polys = []
    for fid in range(n_faces):
        cyc = solid.faces[fid]
        face_polys.append((fid, tuple(placed[fid][vid] for vid in cyc)))

    valid = True
    collision = None
    for i in range(n_faces):
        for j in range(i + 1, n_faces):
            if _clip_area(face_polys[i][1], face_polys[j][1]) > OVERLAP_AREA_TOL:
                valid = False
                collision = (i, j)
                break
        if not valid:
            break
    if not valid and not user_tree:
        raise GeometryError(f"preset unfolding overlapped faces {collision}")

    tab_polys = ()
    if tabs:
        tab_polys = _make_tabs(solid, nbrs, pairs, placed)
    return Net(faces=tuple(face_polys), folds=tuple(folds), tabs=tab_polys,
               valid=valid, collision=collision)


def _make_tabs(solid, nbrs, pairs, placed):
    fold_edges = {frozenset((p, c)) for p, c in pairs}
    tab_polys = []
    owners = _edge_map(solid)
    for edge, fids in sorted(owners.items(), key=lambda kv: sorted(kv[1])):
        a, b = sorted(fids)
        if frozenset((a, b)) in fold_edges:
            continue
        fid = a  # one tab per cut edge, on the lower-numbered face
        cyc = solid.faces[fid]
        for i in range(len(cyc)):
            va, vb = cyc[i], cyc[(i + 1) % len(cyc)]
            if frozenset((va, vb)) == edge:
                break
        e0 = np.array(placed[fid][va])
        e1 = np.array(placed[fid][vb])
        eh = e1 - e0
        length = np.linalg.norm(eh)
        eh /= length
        out = np.array([eh[1], -eh[0]])  # away from the face interior
        w = TAB_WIDTH_RATIO * length
        quad = (e0, e0 + w * eh + w * out, e1 - w * eh + w * out, e1)
        tab_polys.append((fid, tuple((float(p[0]), float(p[1])) for p in quad)))
    return tuple(tab_polys)


def net_area(net):
    total = 0.0
    for _, poly in net.faces:
        s = 0.0
        for j in range(len(poly)):
            px, py = poly[j]
            qx, qy = poly[(j + 1) % len(poly)]
            s += px * qy - py * qx
        total += abs(s) / 2.0
    return total


# ---------------------------------------------------------------------------
# Elevation.


def elevate(solid):
    """Replace every face with a pyramid whose apex keeps all edges unit.

    The apex sits outward at height sqrt(1 - R^2) over the face center,
    R being the face circumradius, so faces of six or more sides (R >= 1)
    are rejected.
    """
    verts = solid.mesh.vertices
    new_verts = [tuple(v) for v in verts]
    cycles = []
    for fid, cyc in enumerate(solid.faces):
        pts = verts[list(cyc)]
        center = pts.mean(axis=0)
        radius = float(np.linalg.norm(pts - center, axis=1).max())
        if radius * radius >= 1.0 - 1e-12:
            raise GeometryError(
                f"face {fid}: circumradius {radius:.6f} leaves no room for a unit apex")
        apex = center + math.sqrt(1.0 - radius * radius) * _newell(pts)
        apex_id = len(new_verts)
        new_verts.append(tuple(apex))
        for i in range(len(cyc)):
            cycles.append((cyc[i], cyc[(i + 1) % len(cyc)], apex_id))
    return _assemble(np.array(new_verts, dtype=float), tuple(cycles))


# ---------------------------------------------------------------------------
# Tilings.


def _hex_center(q, r):
    return 1.5 * q, math.sqrt(3.0) * (r + 0.5 * q)


def _regular_ngon(center, p, circumradius, phase):
    cx, cy = center
    return tuple(
        (cx + circumradius * math.cos(phase + 2.0 * math.pi * k / p),
         cy + circumradius * math.sin(phase + 2.0 * math.pi * k / p))
        for k in range(p)
    )


def _tri_poly(i, j, up):
    h = math.sqrt(3.0) / 2.0
    x0 = i + 0.5 * j
    if up:
        return ((x0, j * h), (x0 + 1.0, j * h), (x0 + 0.5, (j + 1) * h))
    return ((x0 + 1.0, j * h), (x0 + 1.5, (j + 1) * h), (x0 + 0.5, (j + 1) * h))


def _tri_neighbors(cell):
    i, j, up = cell
    if up:
        return ((i, j, False), (i - 1, j, False), (i, j - 1, False))
    return ((i, j, True), (i + 1, j, True), (i, j + 1, True))


def polygon_tiling(p, rings):
    """Rings of unit-edge regular p-gons around a central one, edge to edge.

    Only p in {3, 4, 6} tile the plane. Ring k holds the polygons at
    edge-adjacency distance k from the center; for hexagons that is 6k.
    """
    if p not in (3, 4, 6):
        raise GeometryError(f"regular {p}-gons do not tile the plane")
    rings = int(rings)
    if rings < 0:
        raise GeometryError("rings must be >= 0")

    polys = []
    if p == 6:
        for q in range(-rings, rings + 1):
            for r in range(-rings, rings + 1):
                k = (abs(q) + abs(r) + abs(q + r)) // 2
                if k <= rings:
                    polys.append((k, _regular_ngon(_hex_center(q, r), 6, 1.0, 0.0)))
    elif p == 4:
        for i in range(-rings, rings + 1):
            for j in range(-rings, rings + 1):
                k = abs(i) + abs(j)
                if k <= rings:
                    polys.append((k, _regular_ngon((i, j), 4, math.sqrt(0.5), math.pi / 4)))
    else:
        start = (0, 0, True)
        dist = {start: 0}
        queue = deque([start])
        while queue:
            cell = queue.popleft()
            if dist[cell] == rings:
                continue
            for nb in _tri_neighbors(cell):
                if nb not in dist:
                    dist[nb] = dist[cell] + 1
                    queue.append(nb)
        for cell, k in dist.items():
            polys.append((k, _tri_poly(*cell)))

    def key(item):
        k, poly = item
        cx = sum(pt[0] for pt in poly) / len(poly)
        cy = sum(pt[1] for pt in poly) / len(poly)
        return (k, round(cx, 9), round(cy, 9))

    return [poly for _, poly in sorted(polys, key=key)]
