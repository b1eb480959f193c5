"""Leonardo bridges and domes: glueless reciprocal frames from notched struts.

Self-support is checked geometrically (contact topology and gap residuals),
not mechanically. All solves are deterministic: fixed iteration order, no
randomized starts, so identical inputs give bitwise-identical layouts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .surfaces import TriMesh

SOLVER_BUDGET = 10000
GAP_TOL_RATIO = 1e-6  # solved-layout acceptance, relative to strut length


@dataclass(frozen=True)
class Strut:
    """A rectangular stick: centerline segment plus cross-section and cuts."""

    length: float
    width: float
    thickness: float
    start: tuple
    end: tuple
    notches: tuple = ()

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0 or self.thickness <= 0:
            raise GeometryError("strut dimensions must be positive")
        d = math.dist(self.start, self.end)
        if abs(d - self.length) > 1e-9:
            raise GeometryError(
                f"centerline spans {d!r} but length is {self.length!r}")
        for pos in self.notches:
            if pos < -1e-9 or pos > self.length + 1e-9:
                raise GeometryError(f"notch at {pos!r} falls outside [0, length]")


@dataclass(frozen=True)
class Contact:
    """Strut a rests on strut b at point.

    For bridges gap is the surface residual after solving (zero when the
    boxes kiss); for domes it is the centerline separation itself, which the
    solver drives to the strut thickness for the over/under passing.
    """

    a: int
    b: int
    point: tuple
    gap: float


@dataclass(frozen=True)
class FrameLayout:
    struts: tuple
    contacts: tuple
    kind: str
    symmetry_order: int

    def __post_init__(self):
        for c in self.contacts:
            if c.gap < -1e-12:
                raise GeometryError("contact gap must be nonnegative")
            for sid in (c.a, c.b):
                s = self.struts[sid]
                r = math.hypot(s.width, s.thickness) / 2.0
                if _point_segment_distance(c.point, s.start, s.end) > r + 1e-9:
                    raise GeometryError(
                        f"contact point {c.point} outside strut {sid}")


def _point_segment_distance(p, a, b):
    p = np.asarray(p, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    t = float(np.dot(p - a, d) / np.dot(d, d))
    t = min(1.0, max(0.0, t))
    return float(np.linalg.norm(a + t * d - p))


def strut_template(length, width, thickness):
    """Dimension-only strut lying along x, used as input to the builders."""
    return Strut(length=float(length), width=float(width),
                 thickness=float(thickness),
                 start=(0.0, 0.0, 0.0), end=(float(length), 0.0, 0.0))


def _dims(strut):
    if isinstance(strut, Strut):
        return strut.length, strut.width, strut.thickness
    length, width, thickness = strut
    return float(length), float(width), float(thickness)


# ---------------------------------------------------------------------------
# Bridge.


def _bridge_chain(amp, n, length):
    """Side-view joint positions for inclination fan amplitude amp."""
    angles = [amp * (1.0 - 2.0 * i / (n - 1)) for i in range(n)]
    crown = (n - 2) // 2 if n % 2 == 0 else None
    x = 0.0
    z = 0.0
    starts = [(0.0, 0.0)]
    joints = []
    for i in range(n - 1):
        ci, si = math.cos(angles[i]), math.sin(angles[i])
        if crown is not None and i == crown:
            reach = length  # tips meet at the crown
            back = 0.0
        else:
            reach = 2.0 * length / 3.0
            back = length / 3.0
        jx = starts[i][0] + reach * ci
        jz = starts[i][1] + reach * si
        joints.append((jx, jz))
        cj, sj = math.cos(angles[i + 1]), math.sin(angles[i + 1])
        starts.append((jx - back * cj, jz - back * sj))
    end_x = starts[-1][0] + length * math.cos(angles[-1])
    end_z = starts[-1][1] + length * math.sin(angles[-1])
    return angles, starts, joints, (end_x, end_z)


def leonardo_bridge(n, strut, span):
    """Self-supporting arch: n longitudinal beams woven with spreaders.

    Beam inclinations follow a linear fan solved by bisection so the ground
    anchors sit exactly span apart; each interior joint laps a beam's
    two-thirds notch over the next beam's one-third notch with a transverse
    spreader threaded between them (over/under weave, mirrored past the
    crown so the layout is symmetric through the mid-span plane).
    """
    n = int(n)
    if n < 3:
        raise GeometryError("a bridge needs at least 3 longitudinal beams")
    length, width, thickness = _dims(strut)
    span = float(span)
    if span < length:
        raise GeometryError("span must exceed the strut length")

    def chain_span(amp):
        return _bridge_chain(amp, n, length)[3][0]

    lo, hi = 0.0, 1.5533  # 89 degrees
    s_lo, s_hi = chain_span(lo), chain_span(hi)
    if span > s_lo:
        raise GeometryError(
            f"span {span!r} is infeasible for {n} beams of length {length!r}: "
            f"maximum {s_lo!r}, best residual {span - s_lo!r}")
    if span < s_hi:
        raise GeometryError(
            f"span {span!r} is infeasible for {n} beams of length {length!r}: "
            f"steepest arch reaches {s_hi!r}, best residual {s_hi - span!r}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if chain_span(mid) >= span:
            lo = mid
        else:
            hi = mid
    amp = lo

    angles, starts, joints, _ = _bridge_chain(amp, n, length)
    crown = (n - 2) // 2 if n % 2 == 0 else None
    rise = (n - 1) // 2  # joints 0..rise-1 ascend, the rest descend

    # Whole-beam vertical offsets realizing the over/under weave.
    delta = [0.0]
    for i in range(n - 1):
        if crown is not None and i == crown:
            step = 0.0
        elif i < rise:
            step = 2.0 * thickness
        else:
            step = -2.0 * thickness
        delta.append(delta[-1] + step)

    struts = []
    for i in range(n):
        sx, sz = starts[i]
        ci, si = math.cos(angles[i]), math.sin(angles[i])
        struts.append(Strut(
            length=length, width=width, thickness=thickness,
            start=(sx, 0.0, sz + delta[i]),
            end=(sx + length * ci, 0.0, sz + length * si + delta[i]),
            notches=(length / 3.0, 2.0 * length / 3.0)))

    contacts = []
    for i in range(n - 1):
        jx, jz = joints[i]
        sid = n + i
        if crown is not None and i == crown:
            z_tip = jz + delta[i]
            z_spr = z_tip - thickness
            lower, upper = None, None
        elif i < rise:
            z_low = jz + delta[i]       # beam i below
            z_spr = z_low + thickness
            lower, upper = i, i + 1
        else:
            z_low = jz + delta[i + 1]   # beam i+1 below
            z_spr = z_low + thickness
            lower, upper = i + 1, i
        struts.append(Strut(
            length=length, width=width, thickness=thickness,
            start=(jx, -length / 2.0, z_spr), end=(jx, length / 2.0, z_spr),
            notches=(length / 2.0,)))
        if crown is not None and i == crown:
            for beam in (i, i + 1):
                contacts.append(Contact(
                    a=beam, b=sid,
                    point=(jx, 0.0, z_spr + thickness / 2.0), gap=0.0))
        else:
            contacts.append(Contact(
                a=sid, b=lower,
                point=(jx, 0.0, z_spr - thickness / 2.0), gap=0.0))
            contacts.append(Contact(
                a=upper, b=sid,
                point=(jx, 0.0, z_spr + thickness / 2.0), gap=0.0))

    layout = FrameLayout(struts=tuple(struts), contacts=tuple(contacts),
                         kind="bridge", symmetry_order=2)
    _assert_glueless(layout)
    return layout


# ---------------------------------------------------------------------------
# Dome.


def _segment_closest(p1, q1, p2, q2):
    """Closest points between two segments, with their arc parameters."""
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = float(np.dot(d1, d1))
    e = float(np.dot(d2, d2))
    f = float(np.dot(d2, r))
    b = float(np.dot(d1, d2))
    c = float(np.dot(d1, r))
    den = a * e - b * b
    s = 0.0 if abs(den) < 1e-300 else (b * f - c * e) / den
    s = min(1.0, max(0.0, s))
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = min(1.0, max(0.0, -c / a))
    elif t > 1.0:
        t = 1.0
        s = min(1.0, max(0.0, (b - c) / a))
    c1 = p1 + s * d1
    c2 = p2 + t * d2
    return c1, c2, s, t


def _rot_z(points, angle):
    ca, sa = math.cos(angle), math.sin(angle)
    m = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    return points @ m.T


def _sphere_point(radius, azimuth, polar):
    return np.array([
        radius * math.sin(polar) * math.cos(azimuth),
        radius * math.sin(polar) * math.sin(azimuth),
        radius * math.cos(polar),
    ])


# Each dome ring is a closed band of two chord families, m sticks each.
# The base A chord ascends in azimuth from 0, the base B chord from chi;
# copies are rotations by multiples of 2*pi/m. A crosses the B copies at
# offsets -2..1, passing over the two behind and under the two ahead, so
# every stick rests on two neighbors and carries two others.
_BAND_OFFSETS = (-2, -1, 0, 1)
_BAND_SIGNS = (1.0, 1.0, -1.0, -1.0)


def _band_chords(x):
    """Base chord endpoints from the 11 solve variables."""
    r1, p1, r2, p2, wa, r3, p3, r4, p4, wb, chi = x
    a = np.array([_sphere_point(r1, 0.0, p1), _sphere_point(r2, wa, p2)])
    b = np.array([_sphere_point(r3, chi, p3), _sphere_point(r4, chi + wb, p4)])
    return a, b


def _band_crossings(a, b, delta):
    """Signed gaps and arc parameters at the four woven crossings."""
    gaps = np.empty(4)
    arcs_a = np.empty(4)
    arcs_b = np.empty(4)
    for k, j in enumerate(_BAND_OFFSETS):
        bj = _rot_z(b, j * delta)
        c1, c2, s, t = _segment_closest(a[0], a[1], bj[0], bj[1])
        sign = 1.0 if np.linalg.norm(c1) >= np.linalg.norm(c2) else -1.0
        gaps[k] = sign * float(np.linalg.norm(c1 - c2))
        arcs_a[k] = s
        arcs_b[k] = t
    return gaps, arcs_a, arcs_b


def _band_clearances(a, b, delta):
    """Smallest centerline distances at the non-woven close approaches.

    Covers each family against its own rotated neighbor and the A chord
    against the two B copies just outside the woven window.
    """
    worst = math.inf
    for base in (a, b):
        nxt = _rot_z(base, delta)
        c1, c2, _, _ = _segment_closest(base[0], base[1], nxt[0], nxt[1])
        worst = min(worst, float(np.linalg.norm(c1 - c2)))
    for j in (-3, 2):
        bj = _rot_z(b, j * delta)
        c1, c2, _, _ = _segment_closest(a[0], a[1], bj[0], bj[1])
        worst = min(worst, float(np.linalg.norm(c1 - c2)))
    return worst


def _solve_band(m, radius, length, thickness, anchor, w_seed, c_seed, budget):
    """One ring band: drive the four crossing gaps to the strut thickness.

    Returns (solution x or None, reason, iterations used). Stage one is a
    damped least-norm Newton on eight equalities (two chord lengths, four
    signed gaps, the band's mean latitude and mean radius); stage two, only
    when needed, descends a hinge penalty along the constraint manifold
    until the crossings sit inside the sticks and every non-woven approach
    clears the thickness.
    """
    delta = 2.0 * math.pi / m

    def constraints(x):
        a, b = _band_chords(x)
        gaps, _, _ = _band_crossings(a, b, delta)
        return np.array([
            float(np.linalg.norm(a[1] - a[0])) - length,
            float(np.linalg.norm(b[1] - b[0])) - length,
            _BAND_SIGNS[0] * gaps[0] - thickness,
            _BAND_SIGNS[1] * gaps[1] - thickness,
            _BAND_SIGNS[2] * gaps[2] - thickness,
            _BAND_SIGNS[3] * gaps[3] - thickness,
            0.5 * (x[1] + x[3]) - anchor,
            0.25 * (x[0] + x[2] + x[5] + x[7]) - radius,
        ])

    def shortfalls(x):
        # hinge losses: zero exactly when the band is cleanly assemblable
        a, b = _band_chords(x)
        _, arcs_a, arcs_b = _band_crossings(a, b, delta)
        vals = [max(0.0, 1.1 * thickness - _band_clearances(a, b, delta))]
        for arc in np.concatenate([arcs_a, arcs_b]):
            vals.append(max(0.0, 0.03 - arc))
            vals.append(max(0.0, arc - 0.97))
        return np.array(vals)

    def admissible(x):
        a, b = _band_chords(x)
        _, arcs_a, arcs_b = _band_crossings(a, b, delta)
        lo = min(arcs_a.min(), arcs_b.min())
        hi = max(arcs_a.max(), arcs_b.max())
        if lo < 0.02 or hi > 0.98:
            return False
        return _band_clearances(a, b, delta) >= thickness * (1.0 - 1e-9)

    def jacobian(fun, x, f0):
        jac = np.empty((len(f0), len(x)))
        for k in range(len(x)):
            xp = x.copy()
            xp[k] += 1e-8
            jac[:, k] = (fun(xp) - f0) / 1e-8
        return jac

    x = np.array([radius + c_seed, anchor, radius - c_seed, anchor, w_seed,
                  radius + c_seed, anchor, radius - c_seed, anchor, w_seed,
                  0.5 * delta])
    used = 0
    for _ in range(300):
        if used >= budget:
            return None, "iteration budget exhausted", used
        used += 1
        f = constraints(x)
        if np.abs(f).max() < 1e-13:
            break
        step = np.linalg.lstsq(jacobian(constraints, x, f), -f, rcond=None)[0]
        norm = float(np.linalg.norm(step))
        if norm > 0.1:
            step *= 0.1 / norm
        x = x + 0.7 * step
    residual = float(np.abs(constraints(x)).max())
    if residual > 1e-8 * length:
        return None, f"gap residual {residual!r}", used

    if not admissible(x):
        eta = 1.0
        while used < budget:
            used += 1
            h = shortfalls(x)
            loss = float(h @ h)
            if loss == 0.0 and admissible(x):
                break
            jac_h = jacobian(shortfalls, x, h)
            grad = 2.0 * jac_h.T @ h
            f = constraints(x)
            jac_c = jacobian(constraints, x, f)
            gram = jac_c @ jac_c.T + 1e-12 * np.eye(len(f))
            grad -= jac_c.T @ np.linalg.solve(gram, jac_c @ grad)
            if float(np.linalg.norm(grad)) < 1e-12:
                break
            step = eta * grad
            norm = float(np.linalg.norm(step))
            if norm > 0.01:
                step *= 0.01 / norm
            xn = x - step
            for _ in range(25):
                f = constraints(xn)
                if np.abs(f).max() < 1e-13:
                    break
                fix = np.linalg.lstsq(jacobian(constraints, xn, f), -f, rcond=None)[0]
                xn = xn + 0.8 * fix
            hn = shortfalls(xn)
            if float(hn @ hn) < loss and np.abs(constraints(xn)).max() < 1e-11:
                x = xn
                eta = min(eta * 1.5, 1.0)
            else:
                eta *= 0.5
                if eta < 1e-4:
                    break
        if not admissible(x):
            h = shortfalls(x)
            return None, f"clearance shortfall {math.sqrt(float(h @ h))!r}", used
    return x, "", used


def _band_polar_range(a, b):
    pts = (a[0], a[1], b[0], b[1])
    polars = [math.acos(p[2] / float(np.linalg.norm(p))) for p in pts]
    return min(polars), max(polars)


def _ring_separation(lower, upper, m):
    """Closest centerline approach between all sticks of two solved rings."""
    delta = 2.0 * math.pi / m
    worst = math.inf
    for base_lo in lower:
        for base_hi in upper:
            for i in range(m):
                lo = _rot_z(base_lo, i * delta)
                for j in range(m):
                    hi = _rot_z(base_hi, j * delta)
                    c1, c2, _, _ = _segment_closest(lo[0], lo[1], hi[0], hi[1])
                    worst = min(worst, float(np.linalg.norm(c1 - c2)))
    return worst


def leonardo_dome(rings, segments, strut, radius):
    """Reciprocal stick dome: woven chord bands stacked down the sphere.

    Each ring holds 2m sticks in two families, m ascending in azimuth and
    m descending, rotationally symmetric about the vertical axis. Every
    ascending stick passes over the two descending sticks behind it and
    under the two ahead, so each stick rests on two neighbors and carries
    two more, with all crossing gaps driven to exactly the strut thickness
    (box surfaces kissing). Requests under 8 segments double the stick
    count until the bays are wide enough to seat four crossings; the
    requested rotational symmetry divides the doubled count, so it is
    preserved. Rings stack from the pole outward with adaptive clearance
    margins; when the sphere gets too crowded for another band the build
    fails with the offending ratio or residual in the message.
    """
    rings = int(rings)
    segments = int(segments)
    if segments < 4:
        raise GeometryError("a dome needs at least 4 segments of symmetry")
    if rings < 1:
        raise GeometryError("a dome needs at least 1 ring")
    length, width, thickness = _dims(strut)
    radius = float(radius)
    if radius <= length / 2.0:
        raise GeometryError("radius must exceed half the strut length")

    m = segments
    while m < 8:
        m *= 2
    delta = 2.0 * math.pi / m
    chord_ratio = length / (2.0 * radius * math.sin(delta))
    if chord_ratio >= 0.999:
        raise GeometryError(
            f"strut length {length!r} cannot chord a bay on radius {radius!r}: "
            f"chord ratio {chord_ratio!r} must stay under 1")

    budget = SOLVER_BUDGET
    bands = []
    for k in range(rings):
        if k == 0:
            anchors = [math.asin(chord_ratio)]
        else:
            top = bands[-1]
            p_lo, p_hi = _band_polar_range(top[0], top[1])
            half = 0.5 * (p_hi - p_lo)
            anchors = [p_hi + half + mult * thickness / radius
                       for mult in (2.0, 4.0, 8.0)]
        solution = None
        reason = ""
        for anchor in anchors:
            sin_a = math.sin(anchor)
            if sin_a <= 0.0 or length / (2.0 * radius * sin_a) >= 1.0:
                if not reason:
                    reason = f"no chord fits at polar angle {anchor!r}"
                continue
            w_fit = 2.0 * math.asin(length / (2.0 * radius * sin_a))
            if w_fit < 1.45 * delta:
                # a chord this far from the pole spans under 1.5 bays and
                # cannot reach four crossing partners
                if not reason:
                    reason = (f"azimuth span ratio {w_fit / delta!r} "
                              "falls under 1.45 bays")
                break
            seeds = ((0.5 * thickness, w_fit), (0.5 * thickness, 0.9 * w_fit),
                     (0.5 * thickness, 1.1 * w_fit), (thickness, w_fit),
                     (1.5 * thickness, w_fit))
            for c_seed, w_seed in seeds:
                x, why, used = _solve_band(
                    m, radius, length, thickness, anchor, w_seed, c_seed, budget)
                budget -= used
                if budget <= 0:
                    raise GeometryError(
                        "dome solve exhausted the iteration budget; "
                        f"last state: {why or 'solved band awaiting placement'}")
                if x is None:
                    if not reason:
                        reason = why
                    continue
                a, b = _band_chords(x)
                if k > 0:
                    gap = _ring_separation(bands[-1], (a, b), m)
                    if gap < thickness * (1.0 - 1e-9):
                        if not reason:
                            reason = (f"ring separation {gap!r} under the "
                                      f"thickness {thickness!r}")
                        continue
                solution = (a, b)
                break
            if solution is not None:
                break
        if solution is None:
            raise GeometryError(
                f"dome ring {k} of {rings} is infeasible on radius {radius!r} "
                f"with strut length {length!r}: {reason}")
        bands.append(solution)

    struts = []
    contacts = []
    for a, b in bands:
        offset = len(struts)
        gaps, arcs_a, arcs_b = _band_crossings(a, b, delta)
        notches_a = tuple(sorted(float(s) * length for s in arcs_a))
        notches_b = tuple(sorted(float(t) * length for t in arcs_b))
        copies_a = [_rot_z(a, i * delta) for i in range(m)]
        copies_b = [_rot_z(b, i * delta) for i in range(m)]
        for pts, notches in ((copies_a, notches_a), (copies_b, notches_b)):
            for p in pts:
                struts.append(Strut(
                    length=length, width=width, thickness=thickness,
                    start=tuple(float(v) for v in p[0]),
                    end=tuple(float(v) for v in p[1]),
                    notches=notches))
        for i in range(m):
            pa = copies_a[i]
            for sign, j in zip(_BAND_SIGNS, _BAND_OFFSETS):
                partner = (i + j) % m
                pb = copies_b[partner]
                c1, c2, _, _ = _segment_closest(pa[0], pa[1], pb[0], pb[1])
                point = tuple(float(v) for v in (c1 + c2) / 2.0)
                gap = float(np.linalg.norm(c1 - c2))
                ia = offset + i
                ib = offset + m + partner
                if sign > 0.0:        # A above: it rests on the B stick
                    contacts.append(Contact(a=ia, b=ib, point=point, gap=gap))
                else:
                    contacts.append(Contact(a=ib, b=ia, point=point, gap=gap))

    layout = FrameLayout(struts=tuple(struts), contacts=tuple(contacts),
                         kind="dome", symmetry_order=segments)
    _assert_glueless(layout)
    return layout


def preset_bridge(n=5, length=1.0):
    """Ratio-parameterized default: sticks 1 x 1/15 x 1/25, 80% of max span."""
    dims = strut_template(length, length / 15.0, length / 25.0)
    return leonardo_bridge(n, dims, 0.8 * (n + 2) * length / 3.0)


def preset_dome(segments=8, rings=1, length=1.0):
    """Ratio-parameterized default: radius = 4 x strut length."""
    dims = strut_template(length, length / 15.0, length / 25.0)
    return leonardo_dome(rings, segments, dims, 4.0 * length)


# ---------------------------------------------------------------------------
# Feasibility proxy and cut lists.


def _assert_glueless(layout):
    """Necessary condition for glueless assembly; strict for domes."""
    rests = {i: 0 for i in range(len(layout.struts))}
    carried = {i: 0 for i in range(len(layout.struts))}
    for c in layout.contacts:
        rests[c.a] += 1
        carried[c.b] += 1
    for i, s in enumerate(layout.struts):
        if layout.kind == "dome":
            if rests[i] != 2 or carried[i] != 2:
                raise GeometryError(
                    f"strut {i} has {rests[i]} supporting / {carried[i]} supported "
                    "contacts; a dome strut needs exactly 2 + 2")
            continue
        both = rests[i] > 0 and carried[i] > 0
        grounded = (min(s.start[2], s.end[2]) < 1e-9
                    and rests[i] + carried[i] > 0)
        pinched = rests[i] >= 2 or carried[i] >= 2
        if not (both or grounded or pinched):
            raise GeometryError(f"strut {i} cannot hold without glue")


def _is_solved(layout):
    for c in layout.contacts:
        s = layout.struts[c.a]
        tol = GAP_TOL_RATIO * s.length
        if layout.kind == "dome":
            target = (s.thickness + layout.struts[c.b].thickness) / 2.0
            if abs(c.gap - target) > tol:
                return False
        elif c.gap > tol:
            return False
    return True


@dataclass(frozen=True)
class CutClass:
    label: str
    count: int
    length: float
    width: float
    thickness: float
    notches: tuple
    depth: float


def _canonical_notches(length, notches):
    fwd = tuple(round(p, 9) for p in sorted(notches))
    rev = tuple(round(length - p, 9) for p in sorted(notches, reverse=True))
    return min(fwd, rev)


def cut_list(layout):
    """Congruence classes of struts with their cut specifications."""
    if not _is_solved(layout):
        raise GeometryError("cut list requires a solved layout (gaps in tolerance)")
    groups = {}
    for s in layout.struts:
        key = (round(s.length, 9), round(s.width, 9), round(s.thickness, 9),
               _canonical_notches(s.length, s.notches))
        groups.setdefault(key, []).append(s)
    ordered = sorted(groups.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    out = []
    for rank, (key, members) in enumerate(ordered):
        length, width, thickness, notches = key
        out.append(CutClass(
            label=chr(ord("A") + rank), count=len(members),
            length=length, width=width, thickness=thickness,
            notches=notches, depth=thickness / 2.0))
    return tuple(out)


def cut_list_csv(layout):
    """CSV with fixed columns: class,count,length,notch_1..notch_4,depth."""
    lines = ["class,count,length,notch_1,notch_2,notch_3,notch_4,depth"]
    for row in cut_list(layout):
        notches = list(row.notches)[:4]
        cells = [row.label, str(row.count), f"{row.length:.6f}"]
        cells += [f"{p:.6f}" for p in notches]
        cells += [""] * (4 - len(notches))
        cells.append(f"{row.depth:.6f}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Geometry export.


def _box_frame(strut, kind):
    axis = np.asarray(strut.end, dtype=float) - np.asarray(strut.start, dtype=float)
    axis /= np.linalg.norm(axis)
    if kind == "dome":
        ref = (np.asarray(strut.start, dtype=float)
               + np.asarray(strut.end, dtype=float)) / 2.0
        ref = ref / np.linalg.norm(ref)   # radial: the over/under direction
    else:
        ref = np.array([0.0, 0.0, 1.0])
    t_dir = ref - np.dot(ref, axis) * axis
    norm = np.linalg.norm(t_dir)
    if norm < 1e-12:
        t_dir = np.array([1.0, 0.0, 0.0]) - axis[0] * axis
        norm = np.linalg.norm(t_dir)
    t_dir /= norm
    w_dir = np.cross(t_dir, axis)
    return axis, t_dir, w_dir


_BOX_TRIS = np.array([
    (0, 2, 1), (0, 3, 2), (4, 5, 6), (4, 6, 7),
    (0, 1, 5), (0, 5, 4), (1, 2, 6), (1, 6, 5),
    (2, 3, 7), (2, 7, 6), (3, 0, 4), (3, 4, 7),
], dtype=np.int64)


def layout_mesh(layout):
    """One closed box per strut, merged into a single mesh."""
    verts = []
    tris = []
    for strut in layout.struts:
        axis, t_dir, w_dir = _box_frame(strut, layout.kind)
        a = np.asarray(strut.start, dtype=float)
        b = np.asarray(strut.end, dtype=float)
        tw = t_dir * strut.thickness / 2.0
        ww = w_dir * strut.width / 2.0
        base = len(verts)
        for p in (a, b):
            verts += [p - tw - ww, p - tw + ww, p + tw + ww, p + tw - ww]
        for tri in _BOX_TRIS:
            tris.append(tuple(base + int(v) for v in tri))
    return TriMesh(vertices=np.array(verts, dtype=float),
                   triangles=np.array(tris, dtype=np.int64))
