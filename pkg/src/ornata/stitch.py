"""Curve-stitching templates: pins and an ordered chord sequence.

Chords between two sampled rails (or around a circle) envelope a smooth
curve; the pattern records drill positions and threading order, geometry
only.  Rendering to a printable template is the export module's job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GeometryError

WELD = 1e-9


@dataclass(frozen=True)
class Rail:
    """One source point sequence, as indices into the pattern's pins."""

    label: str
    pin_ids: tuple


@dataclass(frozen=True)
class StitchPattern:
    pins: tuple
    chords: tuple
    rails: tuple

    def __post_init__(self):
        n = len(self.pins)
        seen = {}
        for i, (x, y) in enumerate(self.pins):
            key = (round(x / WELD), round(y / WELD))
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for j in seen.get((key[0] + dx, key[1] + dy), ()):
                        ox, oy = self.pins[j]
                        if math.hypot(x - ox, y - oy) <= WELD:
                            raise GeometryError(f"pins {j} and {i} coincide")
            seen.setdefault(key, []).append(i)
        for k, (a, b) in enumerate(self.chords):
            if not (0 <= a < n and 0 <= b < n):
                raise GeometryError(f"chord {k} references a missing pin")
            if a == b:
                raise GeometryError(f"chord {k} has zero length")


class _PinTable:
    """Welds points closer than 1e-9 into shared pin ids."""

    def __init__(self):
        self.pins = []
        self.buckets = {}

    def add(self, x, y):
        x, y = float(x), float(y)
        key = (round(x / WELD), round(y / WELD))
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in self.buckets.get((key[0] + dx, key[1] + dy), ()):
                    ox, oy = self.pins[j]
                    if math.hypot(x - ox, y - oy) <= WELD:
                        return j
        self.buckets.setdefault(key, []).append(len(self.pins))
        self.pins.append((x, y))
        return len(self.pins) - 1


def _rail_points(rail):
    pts = getattr(rail, "points", rail)
    return [(float(p[0]), float(p[1])) for p in pts]


def two_rail_stitch(rail_a, rail_b, n: int, reverse: bool = False) -> StitchPattern:
    """Chord i joins pin i of rail A to pin i of rail B (n-1-i when reversed).

    Pins are n evenly index-spaced samples of each rail; shared endpoints
    weld into one pin.  Two straight perpendicular rails with reverse=True
    give the classic parabola-envelope pattern.
    """
    if n < 2:
        raise GeometryError(f"need at least 2 chords, got {n}")
    pts_a, pts_b = _rail_points(rail_a), _rail_points(rail_b)
    for name, pts in (("A", pts_a), ("B", pts_b)):
        if len(pts) < n:
            raise GeometryError(f"rail {name} has {len(pts)} samples, need {n}")

    table = _PinTable()

    def select(pts):
        m = len(pts)
        ids = []
        for j in range(n):
            p = pts[int(round(j * (m - 1) / (n - 1)))]
            ids.append(table.add(p[0], p[1]))
        return tuple(ids)

    ids_a = select(pts_a)
    ids_b = select(pts_b)
    chords = []
    for i in range(n):
        j = n - 1 - i if reverse else i
        if ids_a[i] == ids_b[j]:
            raise GeometryError(f"chord {i} connects coincident pins")
        chords.append((ids_a[i], ids_b[j]))
    return StitchPattern(tuple(table.pins), tuple(chords),
                         (Rail("A", ids_a), Rail("B", ids_b)))


def circle_stitch(pins: int, step: int, radius: float = 1.0) -> StitchPattern:
    """Chord k joins pin k to pin (k + step) mod pins on a circle of pins."""
    pins = int(pins)
    step = int(step)
    if pins < 3:
        raise GeometryError(f"need at least 3 pins, got {pins}")
    if not 1 <= step < pins:
        raise GeometryError(f"step {step} outside [1, {pins - 1}]")
    radius = float(radius)
    if not radius > 0:
        raise GeometryError(f"radius {radius} must be positive")
    points = tuple(
        (radius * math.cos(2.0 * math.pi * k / pins),
         radius * math.sin(2.0 * math.pi * k / pins))
        for k in range(pins))
    chords = tuple((k, (k + step) % pins) for k in range(pins))
    return StitchPattern(points, chords, (Rail("circle", tuple(range(pins))),))
