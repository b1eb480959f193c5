/**
 * Typed client for the rendering service. Every method takes an optional
 * AbortSignal so a card can cancel its in-flight request when a newer edit
 * arrives; abort surfaces as the usual DOMException named AbortError.
 */

import type { Entry, MapValue } from "./model";

export interface ParseResult {
  ok: boolean;
  variables: string[];
}

export interface CurveResult {
  points: [number, number][];
  closed: boolean;
  svg: string;
  sha256: string;
}

export interface MeshResult {
  obj: string;
  vertices: number;
  triangles: number;
  sha256: string;
}

export interface RasterResult {
  png_base64: string;
  width: number;
  height: number;
  sha256: string;
}

export interface StitchResult {
  pins: [number, number][];
  chords: [number, number][];
  svg: string;
  sha256: string;
}

export interface NetResult {
  svg: string;
  faces: number;
  folds: number;
  sha256: string;
}

export interface SolidMeshResult {
  obj: string;
  counts: [number, number, number];
  sha256: string;
}

export interface EnumerateResult {
  pairs: [number, number][];
  names: string[];
}

export interface FrameResult {
  cut_list_csv: string;
  struts: number;
  classes: number;
  sha256: string;
}

/** Error payloads are flat {code, message, location, ...} objects. */
export class ApiError extends Error {
  status: number;
  code: string;
  location: string;
  offset?: number;

  constructor(status: number, body: Record<string, unknown>) {
    super(typeof body.message === "string" ? body.message : `HTTP ${status}`);
    this.name = "ApiError";
    this.status = status;
    this.code = typeof body.code === "string" ? body.code : "unknown";
    this.location = typeof body.location === "string" ? body.location : "";
    if (typeof body.offset === "number") this.offset = body.offset;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    private base: string,
    private fetchFn: FetchLike,
  ) {}

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    const payload = await response.json();
    if (!response.ok) throw new ApiError(response.status, payload);
    return payload as T;
  }

  parse(formula: string, signal?: AbortSignal): Promise<ParseResult> {
    return this.post("/api/parse", { formula }, signal);
  }

  curve(entry: Entry, n: number, signal?: AbortSignal): Promise<CurveResult> {
    return this.post("/api/curve", { entry, n }, signal);
  }

  map(entry: Entry, map: MapValue, n: number, signal?: AbortSignal): Promise<CurveResult> {
    return this.post("/api/map", { entry, map, n }, signal);
  }

  surfaceMesh(entry: Entry, resolution: number, signal?: AbortSignal): Promise<MeshResult> {
    return this.post("/api/surface/mesh", { entry, resolution }, signal);
  }

  surfaceRaster(
    entry: Entry,
    axis: string,
    width: number,
    height: number,
    signal?: AbortSignal,
  ): Promise<RasterResult> {
    return this.post("/api/surface/raster", { entry, axis, width, height }, signal);
  }

  stitch(entry: Entry, signal?: AbortSignal): Promise<StitchResult> {
    return this.post("/api/stitch", { entry }, signal);
  }

  solidNet(entry: Entry, signal?: AbortSignal): Promise<NetResult> {
    return this.post("/api/solid", { entry }, signal);
  }

  solidMesh(entry: Entry, signal?: AbortSignal): Promise<SolidMeshResult> {
    return this.post("/api/solid", { entry }, signal);
  }

  enumerateSolids(signal?: AbortSignal): Promise<EnumerateResult> {
    return this.post("/api/solid", { enumerate: true }, signal);
  }

  frame(entry: Entry, signal?: AbortSignal): Promise<FrameResult> {
    return this.post("/api/frame", { entry }, signal);
  }
}

export function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}

/** Network-level failure (service down), as opposed to a service reply. */
export function isOffline(err: unknown): boolean {
  return !(err instanceof ApiError) && !isAbort(err);
}
