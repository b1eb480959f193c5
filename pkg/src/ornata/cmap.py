"""Complex maps over plane curves: exp(z) and the principal branch of (1/z)^alpha.

Points are (x, y) pairs read as z = x + iy. recip_power uses the principal
logarithm (argument in (-pi, pi]); integer alpha sidesteps the branch cut by
repeated complex multiplication, since the map is single-valued there.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .curves import PlaneCurve
from .errors import GeometryError

_CUT_EPS = 1e-12


@dataclass(frozen=True)
class ComplexMap:
    kind: str  # exp | recip_power | compose
    alpha: float | None = None
    inner: "ComplexMap | None" = None
    outer: "ComplexMap | None" = None

    def __post_init__(self):
        if self.kind == "recip_power":
            if self.alpha is None or not math.isfinite(self.alpha):
                raise GeometryError("recip_power needs a finite exponent")
        elif self.kind == "compose":
            if self.inner is None or self.outer is None:
                raise GeometryError("compose needs inner and outer maps")
        elif self.kind != "exp":
            raise GeometryError(f"unknown map kind {self.kind!r}")


EXP = ComplexMap("exp")


def exp_map() -> ComplexMap:
    return EXP


def recip_power(alpha: float) -> ComplexMap:
    return ComplexMap("recip_power", alpha=alpha)


def compose(outer: ComplexMap, inner: ComplexMap) -> ComplexMap:
    return ComplexMap("compose", inner=inner, outer=outer)


def _is_int(a: float) -> bool:
    return a == int(a)


def on_branch_cut(p) -> bool:
    x, y = p
    return x < 0 and abs(y) <= _CUT_EPS * max(1.0, -x)


def map_point(m: ComplexMap, p) -> tuple[float, float]:
    x, y = p
    if m.kind == "exp":
        ex = math.exp(x)
        return (ex * math.cos(y), ex * math.sin(y))
    if m.kind == "compose":
        return map_point(m.outer, map_point(m.inner, p))
    # recip_power
    a = m.alpha
    z = complex(x, y)
    if z == 0:
        if a > 0:
            raise GeometryError(f"pole at origin for (1/z)^{a}")
        if a == 0:
            return (1.0, 0.0)
        # negative alpha: w = z^|a|, fine at 0
    if _is_int(a):
        w = _int_power(z, -int(a))
    else:
        if on_branch_cut(p):
            raise GeometryError(
                f"point ({x!r}, {y!r}) lies on the branch cut (negative real axis)"
            )
        w = cmath.exp(-a * cmath.log(z))
    return (w.real, w.imag)


def _int_power(z: complex, n: int) -> complex:
    """z^n by repeated multiplication; no branch cut involved."""
    if n == 0:
        return complex(1.0, 0.0)
    if n < 0:
        return 1.0 / _int_power(z, -n)
    w = complex(1.0, 0.0)
    base = z
    k = n
    while k:
        if k & 1:
            w *= base
        base *= base
        k >>= 1
    return w


def _is_constant(m: ComplexMap) -> bool:
    # z^0 is identically 1, and a constant factor anywhere in a composition
    # makes the whole map constant.
    if m.kind == "recip_power":
        return m.alpha == 0
    if m.kind == "compose":
        return _is_constant(m.inner) or _is_constant(m.outer)
    return False


def map_curve(m: ComplexMap, curve: PlaneCurve) -> PlaneCurve:
    """Pointwise image of the curve; order preserved, closure recomputed.

    Degenerate maps (recip_power with alpha 0, alone or inside a compose)
    are rejected: the image would collapse to a single point.
    """
    if _is_constant(m):
        raise GeometryError(
            "recip_power alpha=0 is degenerate: the image collapses to a point"
        )
    out = []
    for i, p in enumerate(curve.points):
        try:
            out.append(map_point(m, p))
        except GeometryError as err:
            t = curve.params[i] if i < len(curve.params) else None
            where = f"sample {i}" + (f" (t={t!r})" if t is not None else "")
            raise GeometryError(f"{err} at {where}") from err
    closed = math.dist(out[0], out[-1]) < 1e-9
    return PlaneCurve(points=tuple(out), closed=closed, source=curve.source, params=curve.params)


def check_conformal(m: ComplexMap, p, h: float) -> float:
    """|angle between the images of two orthogonal steps - pi/2|.

    A conformal map preserves angles, so this should vanish as h does.
    """
    x, y = p
    base = map_point(m, p)
    du = _sub(map_point(m, (x + h, y)), base)
    dv = _sub(map_point(m, (x, y + h)), base)
    nu, nv = math.hypot(*du), math.hypot(*dv)
    if nu < 1e-12 or nv < 1e-12:
        raise GeometryError(f"degenerate derivative at ({x!r}, {y!r})")
    dot = (du[0] * dv[0] + du[1] * dv[1]) / (nu * nv)
    angle = math.acos(max(-1.0, min(1.0, dot)))
    return abs(angle - math.pi / 2)


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])
