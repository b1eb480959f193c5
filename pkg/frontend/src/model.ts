/**
 * Client-side design document model.
 *
 * Mirrors the service's design schema: a document is {entries, render,
 * version} where each entry carries a "type" tag. The studio never invents
 * fields of its own inside the document; UI-only state (slider ranges,
 * selected axes) lives next to it and is stripped before export.
 */

export type MapValue =
  | { kind: "exp" }
  | { kind: "recip_power"; alpha: number }
  | { kind: "compose"; outer: MapValue; inner: MapValue };

export interface CurveEntry {
  type: "curve";
  kind: "polar" | "parametric" | "hypocycloid";
  param: string;
  t0: number;
  t1: number;
  radius?: string;
  x?: string;
  y?: string;
  a?: number;
  b?: number;
  c?: number;
}

export interface WarpEntry {
  type: "warp";
  source: string;
  map: MapValue;
}

export interface SurfaceEntry {
  type: "surface";
  formula: string;
  bounds: [number, number][];
}

export interface RadialSurfaceEntry {
  type: "radial_surface";
  rho: string;
  t0: number;
  t1: number;
  u0: number;
  u1: number;
}

export interface StitchEntry {
  type: "stitch";
  kind: "circle" | "two_rail";
  pins?: number;
  step?: number;
  radius?: number;
  rail_a?: [number, number][];
  rail_b?: [number, number][];
  n?: number;
  reverse?: boolean;
}

export interface SolidEntry {
  type: "solid";
  name: string;
  net: boolean;
  spanning: string;
  tabs: boolean;
}

export interface FrameEntry {
  type: "frame";
  kind: "bridge" | "dome";
  length: number;
  width: number;
  thickness: number;
  n?: number;
  span?: number;
  rings?: number;
  segments?: number;
  radius?: number;
}

// Entries the studio has no editor for (e.g. standalone "map") are kept
// verbatim so an imported document survives a save round trip untouched.
export interface OpaqueEntry {
  type: string;
  [key: string]: unknown;
}

export type Entry =
  | CurveEntry
  | WarpEntry
  | SurfaceEntry
  | RadialSurfaceEntry
  | StitchEntry
  | SolidEntry
  | FrameEntry
  | OpaqueEntry;

export interface RenderSettings {
  width: number;
  height: number;
  resolution: number;
  samples: number;
  view: [number, number][] | null;
}

export interface DesignDoc {
  entries: Record<string, Entry>;
  render: RenderSettings;
  version: number;
}

export const TWO_PI = 2 * Math.PI;

export function defaultRender(): RenderSettings {
  return { width: 640, height: 640, resolution: 48, samples: 720, view: null };
}

export function emptyDoc(): DesignDoc {
  return { entries: {}, render: defaultRender(), version: 1 };
}

export const ROSETTE = "sin(4*t)^2 + cos(4*t)";

export function polarEntry(radius: string = ROSETTE): CurveEntry {
  return { type: "curve", kind: "polar", param: "t", t0: 0, t1: TWO_PI, radius };
}

export function parametricEntry(x = "cos(t)", y = "sin(t)"): CurveEntry {
  return { type: "curve", kind: "parametric", param: "t", t0: 0, t1: TWO_PI, x, y };
}

export function hypocycloidEntry(a = 5, b = 3, c = 5): CurveEntry {
  return { type: "curve", kind: "hypocycloid", param: "t", t0: 0, t1: TWO_PI, a, b, c };
}

export function warpEntry(source: string): WarpEntry {
  return { type: "warp", source, map: { kind: "exp" } };
}

export function surfaceEntry(formula = "x^2 + y^2 + z^2 - 1"): SurfaceEntry {
  return {
    type: "surface",
    formula,
    bounds: [[-2, 2], [-2, 2], [-2, 2]],
  };
}

export function radialSurfaceEntry(rho = "1 + 0.2*sin(3*t)*sin(2*u)"): RadialSurfaceEntry {
  return { type: "radial_surface", rho, t0: 0, t1: TWO_PI, u0: 0, u1: Math.PI };
}

export function circleStitchEntry(pins = 24, step = 9): StitchEntry {
  return { type: "stitch", kind: "circle", pins, step, radius: 1 };
}

export function solidEntry(name = "dodecahedron"): SolidEntry {
  return { type: "solid", name, net: true, spanning: "default", tabs: false };
}

export function bridgeFrameEntry(): FrameEntry {
  return {
    type: "frame", kind: "bridge",
    length: 1, width: 1 / 15, thickness: 0.04,
    n: 5, span: 1.8,
  };
}

function sortKeys(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(sortKeys);
  if (value !== null && typeof value === "object") {
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(value as Record<string, unknown>).sort()) {
      const v = (value as Record<string, unknown>)[key];
      if (v !== undefined) out[key] = sortKeys(v);
    }
    return out;
  }
  return value;
}

/** Canonical document text: sorted keys, two-space indent, stable bytes. */
export function canonicalJson(value: unknown): string {
  return JSON.stringify(sortKeys(value), null, 2);
}

export function cloneEntry<T extends Entry>(entry: T): T {
  return JSON.parse(JSON.stringify(entry)) as T;
}

const NAME_RE = /^[a-zA-Z_][a-zA-Z0-9_-]*$/;

export function validName(name: string): boolean {
  return NAME_RE.test(name);
}
