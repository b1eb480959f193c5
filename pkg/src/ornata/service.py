"""Stateless HTTP facade: one POST endpoint per pipeline stage.

Request bodies carry the same entry objects a design document uses, under
an "entry" key, plus render parameters alongside. Responses are JSON with
the computed payload and a sha256 of the principal artifact (SVG, OBJ,
CSV text, or PNG bytes), so comparing against command-line output needs
no file diffing.

Errors come back as {code, message, location}: 400 for an unreadable
body, 422 for schema and formula problems (parse errors add an "offset"
field), 413 over the size limits below, 409 when the computation itself
fails, with the library's error text verbatim.
"""

from __future__ import annotations

import base64
import hashlib
import math

from fastapi import Body, FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import curves as C
from . import expr as E
from . import export as X
from .cmap import map_curve
from .errors import DesignError, OrnataError, ParseError
from .frame import cut_list, cut_list_csv, leonardo_bridge, leonardo_dome, strut_template
from .solids import SOLID_NAMES, build_solid, counts, enumerate_platonic, unfold_net
from .stitch import circle_stitch, two_rail_stitch
from .surfaces import polygonize, raster_render, revolve_radial

MAX_SAMPLES = 100_000
MAX_RESOLUTION = 256
MAX_IMAGE = 2048

app = FastAPI(title="ornata", docs_url=None, redoc_url=None, openapi_url=None)
app.add_middleware(
    CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
)


class _ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, location: str = "", **extra):
        super().__init__(message)
        self.status = status
        self.payload = {"code": code, "message": message, "location": location, **extra}


def _reply(status, code, message, location="", **extra):
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "location": location, **extra},
    )


@app.exception_handler(_ApiError)
async def _on_api_error(request, exc: _ApiError):
    return JSONResponse(status_code=exc.status, content=exc.payload)


@app.exception_handler(RequestValidationError)
async def _on_body_error(request, exc: RequestValidationError):
    # FastAPI flags syntactically broken bodies as json_invalid (with the
    # byte position appended to loc) and absent ones as missing; both are
    # the same client mistake. Everything else is a schema problem.
    for err in exc.errors():
        if err.get("type") in ("json_invalid", "missing") and err.get("loc", [None])[0] == "body":
            return _reply(400, "bad_json", "request body is not valid JSON", "body")
    return _reply(422, "schema", "request body must be a JSON object", "body")


@app.exception_handler(DesignError)
async def _on_schema_error(request, exc: DesignError):
    return _reply(422, "schema", exc.message, exc.path)


@app.exception_handler(ParseError)
async def _on_parse_error(request, exc: ParseError):
    return _reply(422, "parse_error", str(exc), "formula", offset=exc.offset)


@app.exception_handler(OrnataError)
async def _on_computation_error(request, exc: OrnataError):
    return _reply(409, "computation", str(exc))


def _sha(artifact) -> str:
    data = artifact.encode() if isinstance(artifact, str) else artifact
    return hashlib.sha256(data).hexdigest()


def _finite(value, path="body"):
    # Python's JSON parser lets NaN and Infinity through; reject them the
    # same way design documents do.
    if isinstance(value, float) and not math.isfinite(value):
        raise DesignError("non-finite numbers are not allowed", path)
    if isinstance(value, dict):
        for k, v in value.items():
            _finite(v, f"{path}.{k}")
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _finite(v, f"{path}[{i}]")


def _fields(body: dict, *keys):
    _finite(body)
    X._known(body, "body", keys)


def _entry_of(body: dict, allowed: tuple):
    obj = X._get(body, "entry", "body")
    if not isinstance(obj, dict):
        raise DesignError("entry must be an object", "body.entry")
    tag = X._str(obj, "type", "body.entry")
    if tag not in allowed:
        want = " or ".join(allowed)
        raise DesignError(f"expected an entry of type {want}, got {tag!r}", "body.entry.type")
    return tag, X._LOADERS[tag](obj, "body.entry")


def _count(body: dict, key: str, default: int, cap: int, floor: int = 1) -> int:
    v = X._int(body, key, "body", required=False, default=default)
    if v < floor:
        raise DesignError(f"must be an integer >= {floor}", f"body.{key}")
    if v > cap:
        raise _ApiError(413, "limit", f"{key} {v} exceeds the limit of {cap}", f"body.{key}")
    return v


@app.post("/api/parse")
def parse_formula(body: dict = Body()):
    _fields(body, "formula")
    text = X._str(body, "formula", "body")
    ast = E.parse(text)
    return {"ok": True, "variables": sorted(E.variables(ast))}


@app.post("/api/curve")
def curve_endpoint(body: dict = Body()):
    _fields(body, "entry", "n")
    _, cdef = _entry_of(body, ("curve",))
    n = _count(body, "n", 720, MAX_SAMPLES)
    curve = C.sample(cdef, n)
    svg = X.to_svg(curve)
    return {
        "points": [[x, y] for x, y in curve.points],
        "closed": curve.closed,
        "svg": svg,
        "sha256": _sha(svg),
    }


@app.post("/api/map")
def map_endpoint(body: dict = Body()):
    _fields(body, "entry", "map", "n")
    _, cdef = _entry_of(body, ("curve",))
    m = X._load_map_value(X._get(body, "map", "body"), "body.map")
    n = _count(body, "n", 720, MAX_SAMPLES)
    warped = map_curve(m, C.sample(cdef, n))
    svg = X.to_svg(warped)
    return {
        "points": [[x, y] for x, y in warped.points],
        "closed": warped.closed,
        "svg": svg,
        "sha256": _sha(svg),
    }


@app.post("/api/surface/mesh")
def surface_mesh(body: dict = Body()):
    _fields(body, "entry", "resolution")
    tag, sdef = _entry_of(body, ("surface", "radial_surface"))
    res = _count(body, "resolution", 64, MAX_RESOLUTION, floor=2)
    if tag == "surface":
        mesh = polygonize(sdef, resolution=res)
    else:
        mesh = revolve_radial(sdef, n_t=res, n_u=max(4, res // 2))
    obj = X.to_obj(mesh)
    return {
        "obj": obj,
        "vertices": len(mesh.vertices),
        "triangles": len(mesh.triangles),
        "sha256": _sha(obj),
    }


@app.post("/api/surface/raster")
def surface_raster(body: dict = Body()):
    _fields(body, "entry", "axis", "width", "height")
    _, sdef = _entry_of(body, ("surface",))
    axis = X._str(body, "axis", "body", required=False, default="+z")
    width = _count(body, "width", 256, MAX_IMAGE)
    height = _count(body, "height", 256, MAX_IMAGE)
    png = X.to_png(raster_render(sdef, axis=axis, width=width, height=height))
    return {
        "png_base64": base64.b64encode(png).decode(),
        "width": width,
        "height": height,
        "sha256": _sha(png),
    }


@app.post("/api/stitch")
def stitch_endpoint(body: dict = Body()):
    _fields(body, "entry")
    _, spec = _entry_of(body, ("stitch",))
    if spec.kind == "two_rail":
        pattern = two_rail_stitch(spec.rail_a, spec.rail_b, spec.n, reverse=spec.reverse)
    else:
        pattern = circle_stitch(spec.pins, spec.step, spec.radius)
    svg = X.to_svg(pattern)
    return {
        "pins": [[x, y] for x, y in pattern.pins],
        "chords": [[a, b] for a, b in pattern.chords],
        "svg": svg,
        "sha256": _sha(svg),
    }


@app.post("/api/solid")
def solid_endpoint(body: dict = Body()):
    _fields(body, "enumerate", "entry")
    if X._bool(body, "enumerate", "body", required=False, default=False):
        pairs = enumerate_platonic()
        return {
            "pairs": [[pair.p, pair.q] for pair in pairs],
            "names": [SOLID_NAMES[pair] for pair in pairs],
        }
    _, spec = _entry_of(body, ("solid",))
    solid = build_solid(spec.name)
    if spec.net:
        net = unfold_net(solid, spanning=spec.spanning, tabs=spec.tabs)
        svg = X.to_svg(net)
        return {
            "svg": svg,
            "faces": len(net.faces),
            "folds": len(net.folds),
            "sha256": _sha(svg),
        }
    obj = X.to_obj(solid.mesh)
    v, e, f = counts(solid)
    return {"obj": obj, "counts": [v, e, f], "sha256": _sha(obj)}


@app.post("/api/frame")
def frame_endpoint(body: dict = Body()):
    _fields(body, "entry")
    _, spec = _entry_of(body, ("frame",))
    strut = strut_template(spec.length, spec.width, spec.thickness)
    if spec.kind == "bridge":
        layout = leonardo_bridge(spec.n, strut, spec.span)
    else:
        layout = leonardo_dome(spec.rings, spec.segments, strut, spec.radius)
    csv_text = cut_list_csv(layout)
    return {
        "cut_list_csv": csv_text,
        "struts": len(layout.struts),
        "classes": len(cut_list(layout)),
        "sha256": _sha(csv_text),
    }


def serve(host: str = "127.0.0.1", port: int = 8787):
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="info")
