"""Command-line entry point: every pipeline as a subcommand.

Exit codes: 0 with all declared outputs written, 2 for usage errors
(argparse prints to stderr), 1 for computation errors with the library's
error text verbatim. Output files are written to a sibling temp file and
renamed into place, so a failing run never leaves a partial file.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import tempfile

from . import curves as C
from . import expr as E
from .cmap import compose, exp_map, map_curve, recip_power
from .errors import OrnataError
from .export import SvgStyle, load_design, to_obj, to_png, to_svg
from .frame import cut_list_csv, layout_mesh, leonardo_bridge, leonardo_dome, preset_bridge, preset_dome, strut_template
from .solids import SOLID_NAMES, build_solid, elevate, enumerate_platonic, unfold_net
from .stitch import circle_stitch, two_rail_stitch
from .surfaces import implicit, polygonize, radial, raster_render, revolve_radial

# "2pi" and friends in numeric flags: allow a bare pi right after a number
_PI_RE = re.compile(r"(?<=[\d.])\s*pi\b")


def _scalar(parser, flag, text):
    try:
        return E.evaluate(E.parse(_PI_RE.sub("*pi", text.strip())))
    except OrnataError:
        parser.error(f"argument {flag}: cannot read number {text!r}")


def _split(parser, flag, text, n, sep=":"):
    parts = text.split(sep)
    if len(parts) != n:
        parser.error(f"argument {flag}: expected {n} values separated by {sep!r}, got {text!r}")
    return [_scalar(parser, flag, p) for p in parts]


def _points(parser, flag, text):
    pts = []
    for chunk in text.split(";"):
        pts.append(tuple(_split(parser, flag, chunk, 2, sep=",")))
    return tuple(pts)


def _write(path, data):
    """Write whole-file output atomically: temp file next to path, then rename."""
    if isinstance(data, str):
        data = data.encode()
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(prefix=".ornata-", dir=os.path.dirname(target))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# --- shared curve source flags


def _add_curve_source(sub):
    sub.add_argument("--polar", metavar="FORMULA", help="radius formula in t")
    sub.add_argument("--x", metavar="FORMULA", help="x component formula in t")
    sub.add_argument("--y", metavar="FORMULA", help="y component formula in t")
    sub.add_argument("--hypocycloid", metavar="A:B:C", help="rolling-circle radii a, b and pen offset c")
    sub.add_argument("--range", default="0:2pi", metavar="T0:T1", help="parameter interval (default 0:2pi)")
    sub.add_argument("--n", type=int, default=720, help="sample count (default 720)")


def _curve_def(parser, args):
    picked = [k for k in ("polar", "x", "hypocycloid") if getattr(args, k)]
    if args.x or args.y:
        if not (args.x and args.y):
            parser.error("--x and --y must be given together")
    if len(picked) != 1:
        parser.error("pick exactly one curve source: --polar, --x/--y, or --hypocycloid")
    t0, t1 = _split(parser, "--range", args.range, 2)
    if args.polar:
        return C.polar(args.polar, t0, t1)
    if args.x:
        return C.parametric(args.x, args.y, t0, t1)
    a, b, c = _split(parser, "--hypocycloid", args.hypocycloid, 3)
    return C.make_hypocycloid(a, b, c)


def _map_chain(parser, specs):
    maps = []
    for spec in specs:
        head, _, tail = spec.partition(":")
        if head == "exp" and not tail:
            maps.append(exp_map())
        elif head == "recip_power" and tail:
            maps.append(recip_power(_scalar(parser, "--map", tail)))
        else:
            parser.error(f"argument --map: expected exp or recip_power:ALPHA, got {spec!r}")
    chain = maps[0]
    for m in maps[1:]:
        chain = compose(m, chain)  # listed order = application order
    return chain


# --- subcommand handlers


def _run_curve(parser, args):
    curve = C.sample(_curve_def(parser, args), args.n)
    _write(args.out, to_svg(curve, SvgStyle(scale=args.scale)))
    return 0


def _run_map(parser, args):
    curve = C.sample(_curve_def(parser, args), args.n)
    warped = map_curve(_map_chain(parser, args.map), curve)
    _write(args.out, to_svg(warped, SvgStyle(scale=args.scale)))
    return 0


def _run_surface(parser, args):
    if bool(args.f) == bool(args.radial):
        parser.error("pick exactly one of --f or --radial")
    if not (args.mesh or args.raster):
        parser.error("nothing to do: pass --mesh and/or --raster")
    outputs = []
    if args.f:
        bounds = None
        if args.bounds:
            axes = args.bounds.split(",")
            if len(axes) != 3:
                parser.error(f"argument --bounds: expected x0:x1,y0:y1,z0:z1, got {args.bounds!r}")
            bounds = tuple(tuple(_split(parser, "--bounds", ax, 2)) for ax in axes)
        surf = implicit(args.f) if bounds is None else implicit(args.f, bounds)
        if args.mesh:
            outputs.append((args.mesh, to_obj(polygonize(surf, resolution=args.resolution))))
        if args.raster:
            w, h = (int(v) for v in _split(parser, "--size", args.size, 2, sep="x"))
            outputs.append((args.raster, to_png(raster_render(surf, axis=args.axis, width=w, height=h))))
    else:
        if args.raster:
            parser.error("--raster needs an implicit surface (--f)")
        t0, t1 = _split(parser, "--t-range", args.t_range, 2)
        u0, u1 = _split(parser, "--u-range", args.u_range, 2)
        rdef = radial(args.radial, (t0, t1), (u0, u1))
        mesh = revolve_radial(rdef, n_t=args.resolution, n_u=max(4, args.resolution // 2))
        outputs.append((args.mesh, to_obj(mesh)))
    for path, data in outputs:
        _write(path, data)
    return 0


def _run_stitch(parser, args):
    if bool(args.circle) == bool(args.rail_a or args.rail_b):
        parser.error("pick exactly one pattern: --circle or --rail-a/--rail-b")
    if args.circle:
        pins, step = _split(parser, "--circle", args.circle, 2)
        pat = circle_stitch(int(pins), int(step), args.radius)
    else:
        if not (args.rail_a and args.rail_b and args.n):
            parser.error("two-rail stitching needs --rail-a, --rail-b and --n")
        pat = two_rail_stitch(
            _points(parser, "--rail-a", args.rail_a),
            _points(parser, "--rail-b", args.rail_b),
            args.n,
            reverse=args.reverse,
        )
    _write(args.out, to_svg(pat, SvgStyle(scale=args.scale)))
    return 0


def _run_solid(parser, args):
    if args.enumerate:
        for pair in enumerate_platonic():
            print("{%d,%d} %s" % (pair.p, pair.q, SOLID_NAMES[pair]))
        return 0
    if not args.name:
        parser.error("pass --enumerate or --name")
    if not (args.obj or args.net):
        parser.error("nothing to do: pass --obj and/or --net")
    solid = build_solid(args.name)
    outputs = []
    if args.obj:
        mesh = elevate(solid).mesh if args.elevated else solid.mesh
        outputs.append((args.obj, to_obj(mesh)))
    if args.net:
        net = unfold_net(solid, spanning=args.spanning, tabs=args.tabs)
        outputs.append((args.net, to_svg(net, SvgStyle(scale=args.scale))))
    for path, data in outputs:
        _write(path, data)
    return 0


def _run_frame(parser, args):
    if args.preset:
        layout = preset_bridge() if args.preset == "bridge" else preset_dome()
    else:
        if not args.kind:
            parser.error("pass --preset or --kind")
        strut = strut_template(*_split(parser, "--strut", args.strut, 3))
        if args.kind == "bridge":
            if args.n is None or args.span is None:
                parser.error("a bridge needs --n and --span")
            layout = leonardo_bridge(args.n, strut, args.span)
        else:
            if args.rings is None or args.segments is None or args.radius is None:
                parser.error("a dome needs --rings, --segments and --radius")
            layout = leonardo_dome(args.rings, args.segments, strut, args.radius)
    if not (args.cutlist or args.obj):
        parser.error("nothing to do: pass --cutlist and/or --obj")
    outputs = []
    if args.cutlist:
        outputs.append((args.cutlist, cut_list_csv(layout)))
    if args.obj:
        outputs.append((args.obj, to_obj(layout_mesh(layout))))
    for path, data in outputs:
        _write(path, data)
    return 0


def _run_render(parser, args):
    from .report import render_bundle  # defers the matplotlib import

    threads = args.threads
    if threads is None:
        raw = os.environ.get("ORNATA_THREADS", "0") or "0"
        try:
            threads = int(raw)
        except ValueError:
            parser.error(f"ORNATA_THREADS must be an integer, got {raw!r}")
    with open(args.design) as fh:
        doc = load_design(fh.read())
    rows = render_bundle(doc, args.out_dir, threads=threads)
    print(f"rendered {len(rows)} entries into {args.out_dir}")
    return 0


def _run_serve(parser, args):
    from .service import serve  # defers the HTTP stack import

    serve(host=args.host, port=args.port)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ornata",
        description="Mathematical ornament toolkit: curves, maps, surfaces, stitch templates, solids, frames.",
    )
    subs = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = subs.add_parser("curve", help="sample a plane curve to SVG")
    _add_curve_source(p)
    p.add_argument("--out", required=True, metavar="PATH", help="output SVG path")
    p.add_argument("--scale", type=float, default=100.0, help="drawing units per geometry unit")
    p.set_defaults(handler=_run_curve)

    p = subs.add_parser("map", help="warp a curve through complex maps to SVG")
    _add_curve_source(p)
    p.add_argument(
        "--map", action="append", required=True, metavar="SPEC",
        help="exp or recip_power:ALPHA; repeatable, applied in the order given",
    )
    p.add_argument("--out", required=True, metavar="PATH", help="output SVG path")
    p.add_argument("--scale", type=float, default=100.0, help="drawing units per geometry unit")
    p.set_defaults(handler=_run_map)

    p = subs.add_parser("surface", help="polygonize or revolve a surface")
    p.add_argument("--f", metavar="FORMULA", help="implicit surface formula in x, y, z")
    p.add_argument("--radial", metavar="FORMULA", help="radius formula in t (azimuth) and u (inclination)")
    p.add_argument("--bounds", metavar="x0:x1,y0:y1,z0:z1", help="clip box for --f")
    p.add_argument("--t-range", default="0:2pi", metavar="T0:T1", help="azimuth interval for --radial")
    p.add_argument("--u-range", default="0:pi", metavar="U0:U1", help="inclination interval for --radial")
    p.add_argument("--resolution", type=int, default=64, help="marching/revolution grid (default 64)")
    p.add_argument("--mesh", metavar="PATH", help="output OBJ path")
    p.add_argument("--raster", metavar="PATH", help="output PNG path (implicit surfaces only)")
    p.add_argument("--axis", default="+z", help="raster view axis (default +z)")
    p.add_argument("--size", default="256x256", metavar="WxH", help="raster size (default 256x256)")
    p.set_defaults(handler=_run_surface)

    p = subs.add_parser("stitch", help="curve-stitching template to SVG")
    p.add_argument("--circle", metavar="PINS:STEP", help="pins around a circle, chord k to k+step")
    p.add_argument("--radius", type=float, default=1.0, help="circle radius (default 1)")
    p.add_argument("--rail-a", metavar="PTS", help="rail A points as x,y;x,y;...")
    p.add_argument("--rail-b", metavar="PTS", help="rail B points as x,y;x,y;...")
    p.add_argument("--n", type=int, help="chord count for two-rail stitching")
    p.add_argument("--reverse", action="store_true", help="pair pin i with pin n-1-i")
    p.add_argument("--out", required=True, metavar="PATH", help="output SVG path")
    p.add_argument("--scale", type=float, default=100.0, help="drawing units per geometry unit")
    p.set_defaults(handler=_run_stitch)

    p = subs.add_parser("solid", help="platonic solids, elevations, and nets")
    p.add_argument("--enumerate", action="store_true", help="list the five platonic pairs")
    p.add_argument("--name", choices=sorted(SOLID_NAMES.values()), help="which solid")
    p.add_argument("--elevated", action="store_true", help="replace each face with a pyramid of unit-edge triangles")
    p.add_argument("--obj", metavar="PATH", help="output OBJ path for the solid mesh")
    p.add_argument("--net", metavar="PATH", help="output SVG path for the unfolded net")
    p.add_argument("--spanning", default="default", help="net spanning tree preset (default/cross/dress)")
    p.add_argument("--tabs", action="store_true", help="add glue tabs to the net")
    p.add_argument("--scale", type=float, default=100.0, help="drawing units per geometry unit")
    p.set_defaults(handler=_run_solid)

    p = subs.add_parser("frame", help="reciprocal-frame layouts and cut lists")
    p.add_argument("--preset", choices=("bridge", "dome"), help="a ready-made layout")
    p.add_argument("--kind", choices=("bridge", "dome"), help="custom layout kind")
    p.add_argument("--strut", default="1.0:0.0667:0.04", metavar="L:W:T", help="strut length:width:thickness")
    p.add_argument("--n", type=int, help="bridge beam count")
    p.add_argument("--span", type=float, help="bridge anchor distance")
    p.add_argument("--rings", type=int, help="dome ring count")
    p.add_argument("--segments", type=int, help="dome symmetry order")
    p.add_argument("--radius", type=float, help="dome sphere radius")
    p.add_argument("--cutlist", metavar="PATH", help="output CSV cut list")
    p.add_argument("--obj", metavar="PATH", help="output OBJ path for the strut boxes")
    p.set_defaults(handler=_run_frame)

    p = subs.add_parser("render", help="render every entry of a design document")
    p.add_argument("--design", required=True, metavar="PATH", help="input .design.json")
    p.add_argument("--out-dir", required=True, metavar="DIR", help="directory for previews and manifest.csv")
    p.add_argument("--threads", type=int, help="realization thread cap (default ORNATA_THREADS, 0 = auto)")
    p.set_defaults(handler=_run_render)

    p = subs.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1", help="bind address (default 127.0.0.1)")
    p.add_argument("--port", type=int, default=8787, help="port (default 8787)")
    p.set_defaults(handler=_run_serve)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(parser, args)
    except OrnataError as err:
        print(err, file=sys.stderr)
        return 1
    except OSError as err:
        print(err, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
