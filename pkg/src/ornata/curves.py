"""Plane curve families: polar radius curves, parametric pairs, hypocycloids.

Sampling convention: n steps produce n+1 points at t_i = t0 + i*(t1-t0)/n,
endpoints inclusive. Negative polar radius is honored by sign-carrying
multiplication, never clamped, so the point lands on the opposite ray.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import expr as E
from .errors import EvalDomainError, GeometryError

TWO_PI = 2 * math.pi

# an 8-petal rosette: r(t) = sin(4t)^2 + cos(4t)
ROSETTE_RADIUS = "sin(4*t)^2 + cos(4*t)"

_CLOSE_TOL = 1e-9


@dataclass(frozen=True)
class CurveDef:
    """Definition of a plane curve. kind is polar | parametric | hypocycloid."""

    kind: str
    t0: float
    t1: float
    param: str = "t"
    radius: E.Expr | None = None
    x: E.Expr | None = None
    y: E.Expr | None = None
    a: float | None = None
    b: float | None = None
    c: float | None = None

    def __post_init__(self):
        if not self.t0 < self.t1:
            raise GeometryError(f"empty parameter interval [{self.t0}, {self.t1}]")
        if self.kind == "polar":
            if self.radius is None:
                raise GeometryError("polar curve needs a radius formula")
        elif self.kind == "parametric":
            if self.x is None or self.y is None:
                raise GeometryError("parametric curve needs both component formulas")
        elif self.kind == "hypocycloid":
            if not self.b:
                raise GeometryError("hypocycloid requires b != 0")
        else:
            raise GeometryError(f"unknown curve kind {self.kind!r}")


@dataclass(frozen=True)
class PlaneCurve:
    points: tuple  # of (x, y) float pairs
    closed: bool
    source: CurveDef | None = None
    params: tuple = field(default=())

    def __post_init__(self):
        if len(self.points) < 2:
            raise GeometryError("a curve needs at least 2 points")


def polar(radius_text: str, t0: float = 0.0, t1: float = TWO_PI) -> CurveDef:
    return CurveDef(kind="polar", t0=t0, t1=t1, radius=E.parse(radius_text))


def parametric(x_text: str, y_text: str, t0: float, t1: float) -> CurveDef:
    return CurveDef(
        kind="parametric", t0=t0, t1=t1, x=E.parse(x_text), y=E.parse(y_text)
    )


def _params(cdef: CurveDef, n: int):
    if n < 2:
        raise GeometryError(f"need n >= 2 sampling steps, got {n}")
    span = cdef.t1 - cdef.t0
    return [cdef.t0 + i * span / n for i in range(n + 1)]


def _eval_at(formula: E.Expr, param: str, t: float) -> float:
    try:
        return E.evaluate(formula, {param: t})
    except EvalDomainError as err:
        # keep the op name but pin the parameter value it happened at
        raise EvalDomainError(f"{err.op} at {param}={t:.9g}", err.value) from err


def parametric_form(cdef: CurveDef) -> tuple[E.Expr, E.Expr]:
    """Expand any CurveDef into component formulas x(t), y(t)."""
    if cdef.kind == "parametric":
        return cdef.x, cdef.y
    if cdef.kind == "polar":
        t = E.Var(cdef.param)
        return (
            E.Mul(cdef.radius, E.Call("cos", t)),
            E.Mul(cdef.radius, E.Call("sin", t)),
        )
    # hypocycloid: x = (a-b) cos t + c cos(((a-b)/b) t), y = (a-b) sin t - c sin(...)
    a, b, c = cdef.a, cdef.b, cdef.c
    t = E.Var(cdef.param)
    k = E.Num((a - b) / b)
    return (
        E.Add(E.Mul(E.Num(a - b), E.Call("cos", t)), E.Mul(E.Num(c), E.Call("cos", E.Mul(k, t)))),
        E.Sub(E.Mul(E.Num(a - b), E.Call("sin", t)), E.Mul(E.Num(c), E.Call("sin", E.Mul(k, t)))),
    )


def sample_polar(cdef: CurveDef, n: int = 720) -> PlaneCurve:
    """Sample r(t) as (r cos t, r sin t); n+1 points."""
    if cdef.kind != "polar":
        raise GeometryError(f"sample_polar needs a polar curve, got {cdef.kind}")
    ts = _params(cdef, n)
    pts = []
    for t in ts:
        r = _eval_at(cdef.radius, cdef.param, t)
        pts.append((r * math.cos(t), r * math.sin(t)))
    return _finish(pts, cdef, ts)


def sample_parametric(cdef: CurveDef, n: int = 720) -> PlaneCurve:
    """Sample (x(t), y(t)); n+1 points. Accepts hypocycloid defs too."""
    if cdef.kind == "polar":
        raise GeometryError("use sample_polar for polar curves")
    fx, fy = parametric_form(cdef)
    ts = _params(cdef, n)
    pts = [(_eval_at(fx, cdef.param, t), _eval_at(fy, cdef.param, t)) for t in ts]
    return _finish(pts, cdef, ts)


def sample(cdef: CurveDef, n: int = 720) -> PlaneCurve:
    if cdef.kind == "polar":
        return sample_polar(cdef, n)
    return sample_parametric(cdef, n)


def _finish(pts, cdef, ts) -> PlaneCurve:
    for (x, y), t in zip(pts, ts):
        if not (math.isfinite(x) and math.isfinite(y)):
            raise EvalDomainError(f"sample at {cdef.param}={t!r}", x)
    closed = math.dist(pts[0], pts[-1]) < _CLOSE_TOL
    if closed:
        pts[-1] = pts[0]
    return PlaneCurve(points=tuple(pts), closed=closed, source=cdef, params=tuple(ts))


def hypocycloid_turns(a: float, b: float) -> int:
    """Turns until closure: denominator of (a-b)/b in lowest terms.

    Only rational ratios close; irrational ratios raise.
    """
    ratio = (a - b) / b
    frac = Fraction(ratio).limit_denominator(10**6)
    if abs(float(frac) - ratio) > 1e-12:
        raise GeometryError(f"(a-b)/b = {ratio} is not usefully rational")
    return frac.denominator


def make_hypocycloid(a: float, b: float, c: float, turns: int | None = None) -> CurveDef:
    """Modified hypocycloid; c = b recovers the classical curve.

    turns defaults to the closure turn count for rational (a-b)/b.
    """
    if not b:
        raise GeometryError("hypocycloid requires b != 0")
    if turns is None:
        turns = hypocycloid_turns(a, b)
    if turns < 1:
        raise GeometryError(f"turns must be >= 1, got {turns}")
    return CurveDef(kind="hypocycloid", t0=0.0, t1=TWO_PI * turns, a=a, b=b, c=c)


def is_classical(cdef: CurveDef) -> bool:
    return cdef.kind == "hypocycloid" and cdef.b == cdef.c


def derivative_curve(cdef: CurveDef) -> CurveDef:
    """Symbolic hodograph (x'(t), y'(t)) as a new parametric curve."""
    fx, fy = parametric_form(cdef)
    dx = E.simplify(E.differentiate(fx, cdef.param))
    dy = E.simplify(E.differentiate(fy, cdef.param))
    return CurveDef(kind="parametric", t0=cdef.t0, t1=cdef.t1, param=cdef.param, x=dx, y=dy)


def count_cusps(cdef: CurveDef, n: int = 3600, threshold: float = 1e-6) -> int:
    """Cusp count: runs of speed below threshold * max speed on a dense grid.

    The grid wraps for closed curves so a cusp at the seam counts once.
    """
    deriv = derivative_curve(cdef)
    speeds = [math.hypot(x, y) for x, y in sample_parametric(deriv, n).points]
    top = max(speeds)
    if top == 0:
        return 0
    low = [s < threshold * top for s in speeds]
    ends = sample(cdef, 2)
    closed = math.dist(ends.points[0], ends.points[-1]) < _CLOSE_TOL
    if closed:
        low = low[:-1]  # seam sample equals the first one
    count = 0
    m = len(low)
    for i in range(m):
        prev = low[i - 1] if (i > 0 or closed) else False
        if low[i] and not prev:
            count += 1
    return count
