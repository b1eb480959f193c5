/**
 * In-memory stand-in for the rendering service.
 *
 * Speaks the real wire format: JSON request bodies, JSON responses, flat
 * {code, message, location} error objects with the matching HTTP status.
 * Geometry is faked with small deterministic artifacts; the two committed
 * SVG fixtures are genuine service output, returned verbatim when a request
 * matches the design they came from. Tests can take the mock offline, hold
 * selected responses back and release them out of order, or let it ignore
 * aborts to simulate responses that were already on the wire.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const HERE = dirname(fileURLToPath(import.meta.url));

export const ROSETTE_SVG = readFileSync(join(HERE, "fixtures", "rosette.svg"), "utf8");
export const NET_SVG = readFileSync(join(HERE, "fixtures", "dodecahedron-net.svg"), "utf8");

// the polar radius the rosette fixture was rendered from
export const ROSETTE_FORMULA = "sin(4*t)^2 + cos(4*t)";

// 1x1 transparent PNG; stands in for every raster the mock serves
export const PNG_PIXEL =
  "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mNk+M9QDwADhgGAWjR9awAAAABJRU5ErkJggg==";

export interface RecordedCall {
  path: string;
  body: any;
}

interface Gate {
  path: string;
  resolve(): void;
}

function abortError(): DOMException {
  return new DOMException("The operation was aborted.", "AbortError");
}

/** FNV-1a over the canonical JSON of the request, so equal requests hash equal. */
function fingerprint(value: unknown): string {
  const text = JSON.stringify(value);
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return "mock-" + h.toString(16).padStart(8, "0");
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Placeholder SVG that embeds the request, so tests can tell renders apart. */
function syntheticSvg(tag: string, params: unknown): string {
  const body = escapeXml(JSON.stringify(params));
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 64 64" data-mock="${tag}">` +
    `<desc>${body}</desc><circle cx="32" cy="32" r="20" fill="none" stroke="black"/></svg>`
  );
}

function syntheticObj(tag: string, params: unknown): string {
  return `# mock ${tag} ${JSON.stringify(params)}\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n`;
}

/**
 * Just enough of the expression grammar to produce believable parse errors:
 * parentheses must balance and the text must not stop mid-expression. The
 * offsets match the real parser for the cases the tests exercise ("sin(" is
 * rejected at offset 4, the end of the text).
 */
function checkFormula(formula: string): { offset: number; message: string } | null {
  if (formula.trim() === "") return { offset: 0, message: "empty formula" };
  let depth = 0;
  for (let i = 0; i < formula.length; i++) {
    const ch = formula[i];
    if (ch === "(") depth += 1;
    else if (ch === ")") {
      depth -= 1;
      if (depth < 0) return { offset: i, message: "unmatched ')'" };
    }
  }
  if (depth > 0) return { offset: formula.length, message: "unexpected end of input" };
  if (/[+\-*/^(]\s*$/.test(formula)) {
    return { offset: formula.length, message: "unexpected end of input" };
  }
  return null;
}

// recip_power with alpha 0 is constant; so is any composition containing one
function constantMap(map: any): boolean {
  if (!map || typeof map !== "object") return false;
  if (map.kind === "recip_power") return map.alpha === 0;
  if (map.kind === "compose") return constantMap(map.inner) || constantMap(map.outer);
  return false;
}

type Reply = [number, unknown];

function parseError(bad: { offset: number; message: string }, location: string): Reply {
  return [422, { code: "parse_error", message: bad.message, location, offset: bad.offset }];
}

function schemaError(message: string, location: string): Reply {
  return [422, { code: "schema", message, location }];
}

export class MockService {
  calls: RecordedCall[] = [];
  offline = false;

  /** Hold responses whose path matches; deliver them via release(). */
  gateWhen: ((path: string) => boolean) | null = null;

  /** When false, held responses survive an abort and can still be released. */
  respectAbort = true;

  private gates: Gate[] = [];

  readonly fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    if (this.offline) throw new TypeError("fetch failed");
    const path = new URL(input).pathname;
    const body = init?.body ? JSON.parse(String(init.body)) : {};
    this.calls.push({ path, body });
    const signal = init?.signal ?? null;
    if (signal?.aborted) throw abortError();
    if (this.gateWhen?.(path)) await this.hold(path, signal);
    const [status, payload] = this.route(path, body);
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "content-type": "application/json" },
    });
  };

  callsTo(path: string): RecordedCall[] {
    return this.calls.filter((c) => c.path === path);
  }

  /** Paths of responses currently held back, oldest first. */
  get held(): string[] {
    return this.gates.map((g) => g.path);
  }

  release(index = 0): void {
    const [gate] = this.gates.splice(index, 1);
    if (!gate) throw new Error("no held response at that index");
    gate.resolve();
  }

  releaseAll(): void {
    while (this.gates.length > 0) this.release(0);
  }

  private hold(path: string, signal: AbortSignal | null): Promise<void> {
    return new Promise<void>((resolve, reject) => {
      const gate: Gate = { path, resolve };
      this.gates.push(gate);
      if (signal && this.respectAbort) {
        signal.addEventListener(
          "abort",
          () => {
            const at = this.gates.indexOf(gate);
            if (at >= 0) this.gates.splice(at, 1);
            reject(abortError());
          },
          { once: true },
        );
      }
    });
  }

  // ---- routing ----

  private route(path: string, body: any): Reply {
    switch (path) {
      case "/api/parse":
        return this.parse(body);
      case "/api/curve":
        return this.curve(body);
      case "/api/map":
        return this.map(body);
      case "/api/surface/mesh":
        return this.surfaceMesh(body);
      case "/api/surface/raster":
        return this.surfaceRaster(body);
      case "/api/stitch":
        return this.stitch(body);
      case "/api/solid":
        return this.solid(body);
      case "/api/frame":
        return this.frame(body);
      default:
        return [404, { code: "schema", message: `no such endpoint ${path}`, location: "path" }];
    }
  }

  private parse(body: any): Reply {
    const formula = body.formula;
    if (typeof formula !== "string") return schemaError("formula must be a string", "formula");
    const bad = checkFormula(formula);
    if (bad) return parseError(bad, "formula");
    const variables = [...new Set(formula.match(/\b[a-z]\b/g) ?? [])].sort();
    return [200, { ok: true, variables }];
  }

  /** Validates the curve entry the way the service would before sampling. */
  private badCurve(entry: any): Reply | null {
    if (!entry || typeof entry !== "object" || entry.type !== "curve") {
      return schemaError("entry must be a curve", "entry");
    }
    const formulaKeys =
      entry.kind === "polar" ? ["radius"] : entry.kind === "parametric" ? ["x", "y"] : [];
    for (const key of formulaKeys) {
      if (typeof entry[key] !== "string") {
        return schemaError(`${key} must be a string`, `entry.${key}`);
      }
      const bad = checkFormula(entry[key]);
      if (bad) return parseError(bad, `entry.${key}`);
    }
    return null;
  }

  private curvePayload(svg: string, seed: unknown): Reply {
    return [
      200,
      {
        points: [
          [1, 0],
          [0, 1],
          [-1, 0],
        ],
        closed: true,
        svg,
        sha256: fingerprint(seed),
      },
    ];
  }

  private curve(body: any): Reply {
    const bad = this.badCurve(body.entry);
    if (bad) return bad;
    const entry = body.entry;
    const svg =
      entry.kind === "polar" && entry.radius === ROSETTE_FORMULA
        ? ROSETTE_SVG
        : syntheticSvg("curve", entry);
    return this.curvePayload(svg, ["curve", entry, body.n]);
  }

  private map(body: any): Reply {
    const bad = this.badCurve(body.entry);
    if (bad) return bad;
    if (constantMap(body.map)) {
      return [
        409,
        {
          code: "computation",
          message: "recip_power alpha=0 is degenerate: the image collapses to a point",
          location: "map",
        },
      ];
    }
    const svg = syntheticSvg("map", { entry: body.entry, map: body.map });
    return this.curvePayload(svg, ["map", body.entry, body.map, body.n]);
  }

  private surfaceMesh(body: any): Reply {
    const { entry, resolution } = body;
    if (!entry || typeof entry !== "object") return schemaError("entry must be an object", "entry");
    return [
      200,
      {
        obj: syntheticObj("mesh", { entry, resolution }),
        vertices: 3,
        triangles: 1,
        sha256: fingerprint(["mesh", entry, resolution]),
      },
    ];
  }

  private surfaceRaster(body: any): Reply {
    const { entry, axis, width, height } = body;
    return [
      200,
      {
        png_base64: PNG_PIXEL,
        width,
        height,
        sha256: fingerprint(["raster", entry, axis, width, height]),
      },
    ];
  }

  private stitch(body: any): Reply {
    const entry = body.entry;
    if (!entry || typeof entry !== "object" || entry.type !== "stitch") {
      return schemaError("entry must be a stitch", "entry");
    }
    return [
      200,
      {
        pins: [
          [1, 0],
          [0, 1],
        ],
        chords: [[0, 1]],
        svg: syntheticSvg("stitch", entry),
        sha256: fingerprint(["stitch", entry]),
      },
    ];
  }

  private solid(body: any): Reply {
    if (body.enumerate) {
      return [
        200,
        {
          pairs: [
            [3, 3],
            [3, 4],
            [3, 5],
            [4, 3],
            [5, 3],
          ],
          names: ["tetrahedron", "octahedron", "icosahedron", "cube", "dodecahedron"],
        },
      ];
    }
    const entry = body.entry;
    if (!entry || typeof entry !== "object" || entry.type !== "solid") {
      return schemaError("entry must be a solid", "entry");
    }
    if (entry.net) {
      const svg = entry.name === "dodecahedron" ? NET_SVG : syntheticSvg("net", entry);
      return [200, { svg, faces: 12, folds: 11, sha256: fingerprint(["net", entry]) }];
    }
    return [
      200,
      {
        obj: syntheticObj("solid", entry),
        counts: [20, 30, 12],
        sha256: fingerprint(["solid", entry]),
      },
    ];
  }

  private frame(body: any): Reply {
    const entry = body.entry;
    if (!entry || typeof entry !== "object" || entry.type !== "frame") {
      return schemaError("entry must be a frame", "entry");
    }
    const rows = [`bottom,0,0.000,${entry.length}`, `top,1,0.000,${entry.length}`];
    return [
      200,
      {
        cut_list_csv: "class,count,gap,length\n" + rows.join("\n") + "\n",
        struts: 2,
        classes: 2,
        sha256: fingerprint(["frame", entry]),
      },
    ];
  }
}
