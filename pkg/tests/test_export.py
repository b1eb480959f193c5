import io
import json
import math
import random
import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from PIL import Image

from ornata import cmap as M
from ornata import curves as C
from ornata import expr as E
from ornata import solids as So
from ornata import stitch as St
from ornata import surfaces as S
from ornata.curves import CurveDef, PlaneCurve
from ornata.errors import DesignError, GeometryError
from ornata.export import (
    DesignDoc,
    FrameSpec,
    RenderSettings,
    SolidSpec,
    StitchSpec,
    SvgStyle,
    WarpSpec,
    load_design,
    save_design,
    to_obj,
    to_png,
    to_svg,
)
from ornata.surfaces import TriMesh


def tag(el):
    return el.tag.split("}")[-1]


def drawn(svg_text):
    root = ET.fromstring(svg_text)
    return [el for el in root.iter() if tag(el) not in ("svg", "metadata")]


def seg(p, q, n):
    return tuple(
        (p[0] + (q[0] - p[0]) * i / (n - 1), p[1] + (q[1] - p[1]) * i / (n - 1))
        for i in range(n)
    )


TRIANGLE = PlaneCurve(points=((0.0, 0.0), (1.0, 0.0), (1.0, 1.0)), closed=False)


# SVG -----------------------------------------------------------------------


def test_curve_svg_is_one_polyline():
    els = drawn(to_svg(TRIANGLE))
    assert [tag(e) for e in els] == ["polyline"]
    pairs = els[0].attrib["points"].split()
    assert len(pairs) == 3


def test_svg_viewbox_adds_five_percent_margin():
    root = ET.fromstring(to_svg(TRIANGLE))
    x, y, w, h = (float(v) for v in root.attrib["viewBox"].split())
    # content spans 100x100 drawing units at the default scale of 100
    assert (x, y, w, h) == (-5.0, -105.0, 110.0, 110.0)


def test_svg_coordinates_use_six_decimals():
    svg = to_svg(TRIANGLE)
    for el in drawn(svg):
        for token in el.attrib["points"].split():
            for coord in token.split(","):
                assert re.fullmatch(r"-?\d+\.\d{6}", coord), coord
    assert "-0.000000" not in to_svg(St.circle_stitch(12, 5))


def test_stitch_svg_pins_and_chords():
    pat = St.two_rail_stitch(seg((0, 1), (1, 1), 10), seg((0, 0), (1, 0), 10), 10)
    svg = to_svg(pat)
    kinds = [tag(e) for e in drawn(svg)]
    assert kinds.count("circle") == 20
    assert kinds.count("line") == 10
    meta = next(el for el in ET.fromstring(svg).iter() if tag(el) == "metadata")
    steps = meta.text.split()
    assert steps[0] == "threading" and len(steps) == 11
    assert steps[1:] == ["%d-%d" % ab for ab in pat.chords]


def test_stitch_svg_welded_corner_drops_one_pin():
    # reverse keeps chord 0 off the shared corner pin
    pat = St.two_rail_stitch(seg((0, 0), (1, 0), 10), seg((0, 0), (0, 1), 10), 10, reverse=True)
    kinds = [tag(e) for e in drawn(to_svg(pat))]
    assert kinds.count("circle") == 19
    assert kinds.count("line") == 10


def test_net_svg_cut_and_fold_classes():
    net = So.unfold_net(So.build_solid("tetrahedron"))
    els = drawn(to_svg(net))
    polys = [e for e in els if tag(e) == "polygon"]
    lines = [e for e in els if tag(e) == "line"]
    assert len(polys) == 4 and len(lines) == 3
    assert all(p.attrib["class"] == "cut" for p in polys)
    assert all("stroke-dasharray" not in p.attrib for p in polys)
    assert all(l.attrib["class"] == "fold" for l in lines)
    assert all("stroke-dasharray" in l.attrib for l in lines)


def test_net_svg_tabs_are_cut_polygons():
    # cube: 12 edges, 5 folds in the spanning tree, so 7 tabbed cut edges
    net = So.unfold_net(So.build_solid("cube"), tabs=True)
    kinds = [tag(e) for e in drawn(to_svg(net))]
    assert kinds.count("polygon") == 6 + 7
    assert kinds.count("line") == 5


def test_tiling_svg_one_polygon_per_cell():
    kinds = [tag(e) for e in drawn(to_svg(So.polygon_tiling(6, 1)))]
    assert kinds == ["polygon"] * 7


def test_svg_element_inventory():
    allowed = {"polyline", "line", "circle", "polygon", "path"}
    samples = (
        to_svg(TRIANGLE),
        to_svg(St.circle_stitch(24, 7)),
        to_svg(So.unfold_net(So.build_solid("dodecahedron"), spanning="dress")),
        to_svg(So.polygon_tiling(4, 2)),
    )
    for svg in samples:
        assert {tag(e) for e in drawn(svg)} <= allowed
        assert 'version="1.1"' in svg


def test_svg_rejects_empty_and_unknown():
    with pytest.raises(GeometryError, match="empty"):
        to_svg([])
    with pytest.raises(TypeError):
        to_svg(3.5)
    with pytest.raises(GeometryError, match="3 points"):
        to_svg([((0, 0), (1, 1))])


def test_svg_scale_option():
    small = to_svg(TRIANGLE, SvgStyle(scale=1.0))
    root = ET.fromstring(small)
    _, _, w, h = (float(v) for v in root.attrib["viewBox"].split())
    assert w == pytest.approx(1.1) and h == pytest.approx(1.1)


# OBJ -----------------------------------------------------------------------


def obj_reparse(text):
    verts, norms, faces = [], [], []
    for line in text.splitlines():
        head, *rest = line.split()
        if head == "v":
            verts.append([float(v) for v in rest])
        elif head == "vn":
            norms.append([float(v) for v in rest])
        elif head == "f":
            faces.append([int(tok.split("/")[0]) - 1 for tok in rest])
    return np.array(verts), np.array(norms), np.array(faces)


def test_obj_single_triangle():
    mesh = TriMesh(
        vertices=np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
        triangles=np.array([[0, 1, 2]], dtype=np.int32),
    )
    lines = to_obj(mesh).splitlines()
    assert [l.split()[0] for l in lines] == ["v", "v", "v", "f"]
    assert lines[-1] == "f 1 2 3"


def test_obj_cube_counts():
    lines = to_obj(So.build_solid("cube").mesh).splitlines()
    assert sum(1 for l in lines if l.startswith("v ")) == 8
    assert sum(1 for l in lines if l.startswith("f ")) == 12
    # v lines come before f lines
    assert max(i for i, l in enumerate(lines) if l.startswith("v ")) < min(
        i for i, l in enumerate(lines) if l.startswith("f ")
    )


def test_obj_roundtrip_to_six_decimals():
    mesh = So.build_solid("icosahedron").mesh
    verts, _, faces = obj_reparse(to_obj(mesh))
    assert np.allclose(verts, mesh.vertices, atol=5e-7, rtol=0)
    assert np.array_equal(faces, mesh.triangles)


def test_obj_normals_emitted_when_present():
    mesh = S.polygonize(S.implicit("x^2 + y^2 + z^2 - 1"), resolution=8)
    assert mesh.normals is not None
    text = to_obj(mesh)
    lines = text.splitlines()
    assert sum(1 for l in lines if l.startswith("vn ")) == len(mesh.vertices)
    assert all("//" in l for l in lines if l.startswith("f "))
    verts, norms, faces = obj_reparse(text)
    assert np.allclose(norms, mesh.normals, atol=5e-7, rtol=0)
    assert np.array_equal(faces, mesh.triangles)


def test_obj_rejects_broken_mesh():
    bad = TriMesh(
        vertices=np.zeros((2, 3)),
        triangles=np.array([[0, 1, 5]], dtype=np.int32),
    )
    with pytest.raises(GeometryError, match="index"):
        to_obj(bad)


# PNG -----------------------------------------------------------------------


def test_png_is_eight_bit_grayscale():
    shade = np.linspace(0.0, 1.0, 48 * 32).reshape(48, 32)
    img = Image.open(io.BytesIO(to_png(shade)))
    assert img.mode == "L"
    assert img.size == (32, 48)
    got = np.asarray(img)
    assert np.array_equal(got, np.round(shade * 255).astype(np.uint8))


def test_png_clips_out_of_range_shades():
    img = Image.open(io.BytesIO(to_png(np.array([[-1.0, 2.0]]))))
    assert np.asarray(img).tolist() == [[0, 255]]


def test_png_rejects_non_image_arrays():
    with pytest.raises(GeometryError, match="2-d"):
        to_png(np.zeros(9))
    with pytest.raises(GeometryError, match="2-d"):
        to_png(np.zeros((0, 4)))


# design documents ----------------------------------------------------------


def big_doc():
    return DesignDoc(
        entries={
            "rose": C.polar(C.ROSETTE_RADIUS),
            "coil": C.parametric("t*cos(t)", "t*sin(t)", 0.0, 6 * math.pi),
            "wheel": C.make_hypocycloid(5.0, 3.0, 2.0),
            "bare_wheel": CurveDef(kind="hypocycloid", t0=0.0, t1=7.0, b=2.0),
            "slow": CurveDef(kind="polar", t0=0.0, t1=1.0, param="s", radius=E.parse("1 + s")),
            "log": M.compose(M.exp_map(), M.recip_power(0.5)),
            "warped": WarpSpec(source="rose", map=M.EXP),
            "doubly": WarpSpec(source="warped", map=M.recip_power(2.0)),
            "ball": S.implicit("x^2 + y^2 + z^2 - 1"),
            "blob": S.implicit("x^4 + y^4 + z^4 - 1", bounds=((-1.5, 1.5), (-1.5, 1.5), (-1.5, 1.5))),
            "vase": S.radial("1 + 0.2*sin(3*t)*sin(u)"),
            "envelope": StitchSpec(
                kind="two_rail",
                rail_a=seg((0, 1), (1, 1), 24),
                rail_b=seg((0, 0), (1, 0), 24),
                n=24,
                reverse=True,
            ),
            "star": StitchSpec(kind="circle", pins=36, step=14),
            "box": SolidSpec(name="cube", net=True, spanning="cross"),
            "gem": SolidSpec(name="dodecahedron"),
            "arch": FrameSpec(kind="bridge", length=1.0, width=1 / 15, thickness=0.04, n=5, span=3.2),
            "dome": FrameSpec(
                kind="dome", length=1.0, width=1 / 15, thickness=0.04, rings=1, segments=8, radius=4.0
            ),
        },
        render=RenderSettings(width=640, height=480, resolution=48, samples=360, view=((-2.0, 2.0), (-1.0, 1.0))),
    )


def test_empty_doc_roundtrips():
    doc = DesignDoc()
    assert load_design(save_design(doc)) == doc
    assert json.loads(save_design(doc))["entries"] == {}


def test_full_doc_roundtrips_exactly():
    doc = big_doc()
    text = save_design(doc)
    doc2 = load_design(text)
    assert doc2 == doc
    assert save_design(doc2) == text


def test_reloaded_curve_samples_identically():
    doc = DesignDoc(entries={"rose": C.polar(C.ROSETTE_RADIUS)})
    back = load_design(save_design(doc)).entries["rose"]
    assert C.sample(back, 720).points == C.sample(doc.entries["rose"], 720).points


def test_save_is_insertion_order_independent():
    a = DesignDoc(entries={"one": C.polar("1"), "two": C.polar("2")})
    b = DesignDoc(entries={"two": C.polar("2"), "one": C.polar("1")})
    assert save_design(a) == save_design(b)


def test_save_rejects_non_finite_numbers():
    doc = DesignDoc(
        entries={"arch": FrameSpec(kind="bridge", length=1.0, width=0.1, thickness=0.04, n=3, span=math.nan)}
    )
    with pytest.raises(DesignError, match="non-finite"):
        save_design(doc)


def entry_json(entry, **extra):
    body = {"version": 1, "entries": {"it": entry}}
    body.update(extra)
    return json.dumps(body)


def test_load_rejects_version_mismatch():
    with pytest.raises(DesignError, match="version"):
        load_design('{"version": 2, "entries": {}}')
    with pytest.raises(DesignError, match="version"):
        load_design('{"entries": {}}')
    with pytest.raises(DesignError, match="version"):
        load_design('{"version": true, "entries": {}}')


def test_load_rejects_dangling_reference_by_name():
    text = entry_json({"type": "warp", "source": "base", "map": {"kind": "exp"}})
    with pytest.raises(DesignError, match="'base'"):
        load_design(text)


def test_load_rejects_reference_cycle():
    text = json.dumps(
        {
            "version": 1,
            "entries": {
                "a": {"type": "warp", "source": "b", "map": {"kind": "exp"}},
                "b": {"type": "warp", "source": "a", "map": {"kind": "exp"}},
            },
        }
    )
    with pytest.raises(DesignError, match="circular"):
        load_design(text)


def test_load_rejects_warping_a_surface():
    text = json.dumps(
        {
            "version": 1,
            "entries": {
                "ball": {"type": "surface", "formula": "x^2 + y^2 + z^2 - 1",
                         "bounds": [[-1.6, 1.6], [-1.6, 1.6], [-1.6, 1.6]]},
                "w": {"type": "warp", "source": "ball", "map": {"kind": "exp"}},
            },
        }
    )
    with pytest.raises(DesignError, match="not a curve"):
        load_design(text)


def test_load_rejects_unknown_fields_with_path():
    text = entry_json(
        {"type": "curve", "kind": "polar", "radius": "t", "t0": 0, "t1": 1, "colour": 3}
    )
    with pytest.raises(DesignError, match=r"entries\.it\.colour"):
        load_design(text)
    with pytest.raises(DesignError, match="bogus"):
        load_design('{"version": 1, "bogus": 4}')
    with pytest.raises(DesignError, match=r"render\.dpi"):
        load_design('{"version": 1, "render": {"dpi": 300}}')


def test_load_names_entry_and_offset_for_bad_formula():
    text = entry_json({"type": "curve", "kind": "polar", "radius": "sin(", "t0": 0, "t1": 1})
    with pytest.raises(DesignError, match=r"entries\.it\.radius.*offset 4"):
        load_design(text)


def test_load_rejects_malformed_documents():
    with pytest.raises(DesignError, match="JSON"):
        load_design("{not json")
    with pytest.raises(DesignError, match="object"):
        load_design("[1, 2]")
    with pytest.raises(DesignError, match="non-finite"):
        load_design('{"version": 1, "entries": {"f": {"type": "frame", "kind": "bridge", '
                    '"length": 1.0, "width": 0.1, "thickness": 0.04, "n": 3, "span": NaN}}}')
    with pytest.raises(DesignError, match="unknown entry type"):
        load_design(entry_json({"type": "sculpture"}))
    with pytest.raises(DesignError, match="missing field"):
        load_design(entry_json({"type": "curve", "kind": "polar", "t0": 0, "t1": 1}))
    with pytest.raises(DesignError, match="must be a number"):
        load_design(entry_json({"type": "curve", "kind": "polar", "radius": "t", "t0": "x", "t1": 1}))
    with pytest.raises(DesignError, match="empty parameter interval"):
        load_design(entry_json({"type": "curve", "kind": "polar", "radius": "t", "t0": 2, "t1": 1}))
    with pytest.raises(DesignError, match=r"render\.view"):
        load_design('{"version": 1, "entries": {}, "render": {"view": [[0, 1]]}}')


def test_constructed_specs_validate():
    with pytest.raises(DesignError, match="unknown solid"):
        SolidSpec(name="pyramid")
    with pytest.raises(DesignError, match="stitch"):
        StitchSpec(kind="spiral")
    with pytest.raises(DesignError, match="beams"):
        FrameSpec(kind="bridge", length=1.0, width=0.1, thickness=0.04, n=2, span=2.0)
    with pytest.raises(DesignError, match="version"):
        DesignDoc(version=3)
    with pytest.raises(DesignError, match="positive integer"):
        RenderSettings(width=0)
    with pytest.raises(DesignError, match="increasing"):
        RenderSettings(view=((1.0, 0.0), (0.0, 1.0)))
    with pytest.raises(DesignError, match="missing entry"):
        DesignDoc(entries={"w": WarpSpec(source="gone", map=M.EXP)})


# property: generated docs round-trip ---------------------------------------


def rand_formula(rng, names):
    atoms = [
        lambda: repr(rng.uniform(-3, 3)),
        lambda: rng.choice(names),
        lambda: "pi",
        lambda: "%s(%s * %s)" % (rng.choice(("sin", "cos", "exp")), round(rng.uniform(0.5, 4), 3), rng.choice(names)),
    ]
    parts = [rng.choice(atoms)() for _ in range(rng.randint(1, 3))]
    return (" %s " % rng.choice("+-*")).join(parts)


def rand_map(rng, depth=0):
    kind = rng.choice(("exp", "recip_power", "compose") if depth < 2 else ("exp", "recip_power"))
    if kind == "exp":
        return M.exp_map()
    if kind == "recip_power":
        return M.recip_power(rng.uniform(-2, 2))
    return M.compose(rand_map(rng, depth + 1), rand_map(rng, depth + 1))


def rand_entry(rng, curve_names):
    roll = rng.randrange(8)
    if roll == 0:
        t0 = rng.uniform(-3, 3)
        return C.polar(rand_formula(rng, ("t",)), t0, t0 + rng.uniform(0.1, 6))
    if roll == 1:
        t0 = rng.uniform(-3, 3)
        return C.parametric(rand_formula(rng, ("t",)), rand_formula(rng, ("t",)), t0, t0 + rng.uniform(0.1, 6))
    if roll == 2:
        return C.make_hypocycloid(rng.randint(3, 9), rng.randint(1, 2), rng.uniform(0.5, 3))
    if roll == 3:
        return rand_map(rng)
    if roll == 4 and curve_names:
        return WarpSpec(source=rng.choice(curve_names), map=rand_map(rng))
    if roll == 5:
        lo = [rng.uniform(-3, -0.5) for _ in range(3)]
        bounds = tuple((v, v + rng.uniform(1, 4)) for v in lo)
        return S.implicit(rand_formula(rng, ("x", "y", "z")), bounds=bounds)
    if roll == 6:
        if rng.random() < 0.5:
            return StitchSpec(kind="circle", pins=rng.randint(3, 40), step=rng.randint(1, 2), radius=rng.uniform(0.1, 3))
        k = rng.randint(2, 12)
        return StitchSpec(
            kind="two_rail",
            rail_a=tuple((rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(k)),
            rail_b=tuple((rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(k)),
            n=k,
            reverse=rng.random() < 0.5,
        )
    if roll == 7:
        if rng.random() < 0.5:
            return SolidSpec(
                name=rng.choice(("tetrahedron", "cube", "octahedron", "dodecahedron", "icosahedron")),
                net=rng.random() < 0.5,
                tabs=rng.random() < 0.5,
            )
        if rng.random() < 0.5:
            return FrameSpec(
                kind="bridge", length=rng.uniform(0.5, 2), width=rng.uniform(0.01, 0.2),
                thickness=rng.uniform(0.01, 0.2), n=rng.randint(3, 9), span=rng.uniform(1, 5),
            )
        return FrameSpec(
            kind="dome", length=rng.uniform(0.5, 2), width=rng.uniform(0.01, 0.2),
            thickness=rng.uniform(0.01, 0.2), rings=rng.randint(1, 3),
            segments=rng.randint(4, 16), radius=rng.uniform(2, 9),
        )
    return S.radial(rand_formula(rng, ("t", "u")), (0.0, rng.uniform(1, 7)), (0.0, rng.uniform(0.5, 3)))


def rand_doc(rng):
    entries = {}
    curve_names = []
    for i in range(rng.randint(1, 6)):
        name = rng.choice(("entry", "tile", "mønster")) + str(i)
        entry = rand_entry(rng, curve_names)
        entries[name] = entry
        if isinstance(entry, (CurveDef, WarpSpec)):
            curve_names.append(name)
    view = None
    if rng.random() < 0.3:
        xa, ya = rng.uniform(-4, 0), rng.uniform(-4, 0)
        view = ((xa, xa + rng.uniform(0.5, 5)), (ya, ya + rng.uniform(0.5, 5)))
    render = RenderSettings(
        width=rng.randint(16, 2048), height=rng.randint(16, 2048),
        resolution=rng.randint(4, 256), samples=rng.randint(8, 10000), view=view,
    )
    return DesignDoc(entries=entries, render=render)


def test_design_roundtrip_on_500_generated_docs():
    rng = random.Random(20260815)
    for _ in range(500):
        doc = rand_doc(rng)
        text = save_design(doc)
        doc2 = load_design(text)
        assert doc2 == doc
        assert save_design(doc2) == text
