/**
 * The design studio: entry cards with live previews.
 *
 * Every preview is a verbatim service artifact (SVG text, PNG bytes, OBJ or
 * CSV text); the studio never computes geometry, it only displays what the
 * service returns. Edits bump a per-card revision and go through a shared
 * debounce; each card keeps at most one request in flight and aborts the
 * previous one, so the latest edit always wins. A failed or pending render
 * leaves the last good preview on screen under a "stale" badge.
 */

import { ApiError, Client, isAbort, isOffline } from "./api";
import { debounce } from "./debounce";
import { downloadBase64, downloadText } from "./download";
import {
  bridgeFrameEntry,
  canonicalJson,
  circleStitchEntry,
  cloneEntry,
  defaultRender,
  hypocycloidEntry,
  parametricEntry,
  polarEntry,
  radialSurfaceEntry,
  solidEntry,
  surfaceEntry,
  warpEntry,
} from "./model";
import type {
  CurveEntry,
  DesignDoc,
  Entry,
  FrameEntry,
  RenderSettings,
  SolidEntry,
  StitchEntry,
  SurfaceEntry,
  RadialSurfaceEntry,
  WarpEntry,
} from "./model";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export interface StudioOptions {
  debounceMs?: number;
  storageKey?: string;
}

interface UiBindings {
  axis?: string;
  alphaMax?: number;
}

type Artifact =
  | { kind: "svg"; text: string }
  | { kind: "png"; base64: string }
  | { kind: "obj"; text: string }
  | { kind: "csv"; text: string };

interface Card {
  name: string;
  entry: Entry;
  ui: UiBindings;
  root: HTMLElement;
  body: HTMLElement;
  preview: HTMLElement;
  prePane: HTMLElement | null;
  badge: HTMLElement;
  messageBox: HTMLElement;
  fieldErrors: Map<string, HTMLElement>;
  dirtyFormulas: Set<string>;
  revision: number;
  shownRevision: number;
  sha: string | null;
  preSha: string | null;
  artifact: Artifact | null;
  needPre: boolean;
  controller: AbortController | null;
  schedule: { (): void; cancel(): void };
}

const SOLID_NAMES = ["tetrahedron", "cube", "octahedron", "dodecahedron", "icosahedron"];
const SPANNINGS = ["default", "cross", "dress"];
const AXES = ["+x", "-x", "+y", "-y", "+z", "-z"];
const RASTER_SIZE = 256;

export class Studio {
  readonly cards = new Map<string, Card>();
  render: RenderSettings = defaultRender();

  private client: Client;
  private storage: StorageLike;
  private debounceMs: number;
  private storageKey: string;
  private cardsHost: HTMLElement;
  private banner: HTMLElement;
  private statusEl: HTMLElement;
  private pending = new Set<Promise<void>>();
  private counter = 0;

  constructor(root: HTMLElement, client: Client, storage: StorageLike, opts: StudioOptions = {}) {
    this.client = client;
    this.storage = storage;
    this.debounceMs = opts.debounceMs ?? 150;
    this.storageKey = opts.storageKey ?? "ornata.studio.v1";

    root.replaceChildren();
    this.banner = el("div", "offline-banner");
    this.banner.textContent = "Service unreachable. Edits are kept locally and will render once it is back.";
    this.banner.hidden = true;

    const toolbar = el("div", "toolbar");
    const adders: [string, () => Entry][] = [
      ["+ polar", () => polarEntry()],
      ["+ parametric", () => parametricEntry()],
      ["+ hypocycloid", () => hypocycloidEntry()],
      ["+ warp", () => warpEntry(this.firstCurveName() ?? "curve")],
      ["+ surface", () => surfaceEntry()],
      ["+ radial", () => radialSurfaceEntry()],
      ["+ stitch", () => circleStitchEntry()],
      ["+ solid", () => solidEntry()],
      ["+ frame", () => bridgeFrameEntry()],
    ];
    for (const [label, make] of adders) {
      toolbar.append(button(label, () => {
        const entry = make();
        this.addEntry(this.freshName(entry.type), entry);
      }));
    }
    const saveBtn = button("Save", () => this.save());
    const loadBtn = button("Load", () => {
      if (!this.load()) this.status("nothing saved yet");
    });
    const exportBtn = button("Export design.json", () => {
      downloadText("studio.design.json", canonicalJson(this.docJson()), "application/json");
    });
    this.statusEl = el("span", "toolbar-status");
    toolbar.append(el("span", "toolbar-gap"), saveBtn, loadBtn, exportBtn, this.statusEl);

    this.cardsHost = el("div", "cards");
    root.append(this.banner, toolbar, this.cardsHost);
  }

  // ---- document assembly ----

  docJson(): DesignDoc {
    const entries: Record<string, Entry> = {};
    for (const [name, card] of this.cards) entries[name] = card.entry;
    return { entries, render: this.render, version: 1 };
  }

  hashes(): Record<string, string> {
    const out: Record<string, string> = {};
    for (const [name, card] of this.cards) {
      if (card.sha) out[name] = card.sha;
    }
    return out;
  }

  save(): void {
    const ui: Record<string, UiBindings> = {};
    for (const [name, card] of this.cards) ui[name] = card.ui;
    const payload = { design: this.docJson(), ui };
    this.storage.setItem(this.storageKey, JSON.stringify(payload));
    this.status("saved");
  }

  load(): boolean {
    const raw = this.storage.getItem(this.storageKey);
    if (raw === null) return false;
    let payload: { design?: DesignDoc; ui?: Record<string, UiBindings> };
    try {
      payload = JSON.parse(raw);
    } catch {
      this.status("saved state is not valid JSON");
      return false;
    }
    const design = payload.design;
    if (!design || typeof design !== "object" || typeof design.entries !== "object") {
      this.status("saved state has no design");
      return false;
    }
    for (const card of this.cards.values()) card.schedule.cancel();
    this.cards.clear();
    this.cardsHost.replaceChildren();
    this.render = design.render ?? defaultRender();
    for (const [name, entry] of Object.entries(design.entries)) {
      this.addEntry(name, cloneEntry(entry), payload.ui?.[name]);
    }
    this.status("loaded");
    return true;
  }

  /** Resolves when no render is in flight. Renders started meanwhile count. */
  async idle(): Promise<void> {
    while (this.pending.size > 0) {
      await Promise.all([...this.pending]);
    }
  }

  // ---- cards ----

  addEntry(name: string, entry: Entry, ui?: UiBindings): Card {
    const root = el("section", "card");
    const header = el("header", "card-header");
    const title = el("span", "card-title");
    title.textContent = `${name} · ${entry.type}`;
    const badge = el("span", "stale-badge");
    badge.textContent = "stale";
    badge.hidden = true;
    const remove = button("×", () => this.removeCard(name));
    remove.className = "card-remove";
    header.append(title, badge, remove);

    const body = el("div", "card-body");
    const preview = el("div", "preview");
    const messageBox = el("div", "card-message");
    messageBox.hidden = true;

    const card: Card = {
      name,
      entry,
      ui: ui ?? {},
      root,
      body,
      preview,
      prePane: null,
      badge,
      messageBox,
      fieldErrors: new Map(),
      dirtyFormulas: new Set(),
      revision: 0,
      shownRevision: -1,
      sha: null,
      preSha: null,
      artifact: null,
      needPre: entry.type === "warp",
      controller: null,
      schedule: debounce(() => {
        this.track(this.renderCard(card));
      }, this.debounceMs),
    };

    this.buildEditor(card);

    const panes = el("div", "panes");
    if (entry.type === "warp") {
      card.prePane = el("div", "preview pre-image");
      const left = el("div", "pane");
      left.append(paneLabel("pre-image"), card.prePane);
      const right = el("div", "pane");
      right.append(paneLabel("image"), preview);
      panes.append(left, right);
    } else {
      panes.append(preview);
    }

    root.append(header, body, panes, messageBox, this.buildExports(card));
    this.cardsHost.append(root);
    this.cards.set(name, card);
    this.touch(card);
    return card;
  }

  removeCard(name: string): void {
    const card = this.cards.get(name);
    if (!card) return;
    card.schedule.cancel();
    card.controller?.abort();
    card.root.remove();
    this.cards.delete(name);
  }

  /** Register an edit: the shown preview no longer matches the parameters. */
  touch(card: Card, opts: { pre?: boolean } = {}): void {
    card.revision += 1;
    card.badge.hidden = false;
    if (opts.pre) card.needPre = true;
    card.schedule();
    if (card.entry.type === "curve") {
      for (const other of this.cards.values()) {
        if (other.entry.type === "warp" && (other.entry as WarpEntry).source === card.name) {
          this.touch(other, { pre: true });
        }
      }
    }
  }

  private track(p: Promise<void>): void {
    this.pending.add(p);
    p.finally(() => this.pending.delete(p));
  }

  private firstCurveName(): string | null {
    for (const [name, card] of this.cards) {
      if (card.entry.type === "curve") return name;
    }
    return null;
  }

  private freshName(base: string): string {
    this.counter += 1;
    let name = `${base}${this.counter}`;
    while (this.cards.has(name)) {
      this.counter += 1;
      name = `${base}${this.counter}`;
    }
    return name;
  }

  private status(text: string): void {
    this.statusEl.textContent = text;
  }

  private setOffline(on: boolean): void {
    this.banner.hidden = !on;
  }

  // ---- rendering ----

  private async renderCard(card: Card): Promise<void> {
    card.controller?.abort();
    const controller = new AbortController();
    card.controller = controller;
    const revision = card.revision;
    try {
      if (!(await this.validateFormulas(card, controller.signal))) return;
      if (card.needPre && card.entry.type === "warp") {
        await this.renderPreImage(card, controller.signal);
        card.needPre = false;
      }
      const result = await this.request(card, controller.signal);
      if (revision !== card.revision) return; // a newer edit re-scheduled
      this.setOffline(false);
      this.showMessage(card, null);
      if (result.sha !== card.sha) {
        this.paint(card.preview, result.artifact);
        card.sha = result.sha;
      }
      card.artifact = result.artifact;
      card.shownRevision = revision;
      card.badge.hidden = true;
    } catch (err) {
      if (isAbort(err)) return;
      if (err instanceof ApiError) {
        this.setOffline(false);
        this.showMessage(card, err.message, err.status === 409);
      } else if (isOffline(err)) {
        this.setOffline(true);
      } else {
        this.showMessage(card, String(err));
      }
      // the last good preview stays up; the badge keeps marking it stale
    }
  }

  private async validateFormulas(card: Card, signal: AbortSignal): Promise<boolean> {
    for (const key of [...card.dirtyFormulas]) {
      const text = (card.entry as unknown as Record<string, unknown>)[key];
      if (typeof text !== "string") {
        card.dirtyFormulas.delete(key);
        continue;
      }
      try {
        await this.client.parse(text, signal);
      } catch (err) {
        if (err instanceof ApiError && err.code === "parse_error") {
          this.setOffline(false);
          this.showFieldError(card, key, text, err.offset ?? 0, err.message);
          return false;
        }
        throw err;
      }
      card.dirtyFormulas.delete(key);
      this.clearFieldError(card, key);
    }
    return true;
  }

  private async renderPreImage(card: Card, signal: AbortSignal): Promise<void> {
    const pane = card.prePane;
    if (!pane) return;
    const source = (card.entry as WarpEntry).source;
    const sourceCard = this.cards.get(source);
    if (!sourceCard || sourceCard.entry.type !== "curve") {
      pane.textContent = `source ${JSON.stringify(source)} is not a curve entry`;
      card.preSha = null;
      return;
    }
    const result = await this.client.curve(sourceCard.entry, this.render.samples, signal);
    if (result.sha256 !== card.preSha) {
      pane.innerHTML = result.svg;
      card.preSha = result.sha256;
    }
  }

  private async request(
    card: Card,
    signal: AbortSignal,
  ): Promise<{ artifact: Artifact; sha: string }> {
    const entry = card.entry;
    switch (entry.type) {
      case "curve": {
        const r = await this.client.curve(entry, this.render.samples, signal);
        return { artifact: { kind: "svg", text: r.svg }, sha: r.sha256 };
      }
      case "warp": {
        const w = entry as WarpEntry;
        const sourceCard = this.cards.get(w.source);
        if (!sourceCard || sourceCard.entry.type !== "curve") {
          throw new ApiError(422, {
            code: "schema",
            message: `warp source ${JSON.stringify(w.source)} is not a curve entry`,
            location: "source",
          });
        }
        const r = await this.client.map(sourceCard.entry, w.map, this.render.samples, signal);
        return { artifact: { kind: "svg", text: r.svg }, sha: r.sha256 };
      }
      case "surface": {
        const axis = card.ui.axis ?? "+z";
        const r = await this.client.surfaceRaster(entry, axis, RASTER_SIZE, RASTER_SIZE, signal);
        return { artifact: { kind: "png", base64: r.png_base64 }, sha: r.sha256 };
      }
      case "radial_surface": {
        const r = await this.client.surfaceMesh(entry, this.render.resolution, signal);
        return {
          artifact: { kind: "obj", text: r.obj },
          sha: r.sha256,
        };
      }
      case "stitch": {
        const r = await this.client.stitch(entry, signal);
        return { artifact: { kind: "svg", text: r.svg }, sha: r.sha256 };
      }
      case "solid": {
        const s = entry as SolidEntry;
        if (s.net) {
          const r = await this.client.solidNet(entry, signal);
          return { artifact: { kind: "svg", text: r.svg }, sha: r.sha256 };
        }
        const r = await this.client.solidMesh(entry, signal);
        return { artifact: { kind: "obj", text: r.obj }, sha: r.sha256 };
      }
      case "frame": {
        const r = await this.client.frame(entry, signal);
        return { artifact: { kind: "csv", text: r.cut_list_csv }, sha: r.sha256 };
      }
      default:
        throw new ApiError(422, {
          code: "schema",
          message: `no preview for entries of type ${JSON.stringify(entry.type)}`,
          location: "type",
        });
    }
  }

  private paint(pane: HTMLElement, artifact: Artifact): void {
    if (artifact.kind === "svg") {
      pane.innerHTML = artifact.text;
      return;
    }
    if (artifact.kind === "png") {
      pane.replaceChildren();
      const img = document.createElement("img");
      img.src = `data:image/png;base64,${artifact.base64}`;
      img.alt = "surface render";
      pane.append(img);
      return;
    }
    // obj and csv artifacts are text; show them as-is
    pane.replaceChildren();
    const pre = el("pre", "artifact-text");
    pre.textContent = artifact.text;
    pane.append(pre);
  }

  private showMessage(card: Card, text: string | null, highlight = false): void {
    if (text === null) {
      card.messageBox.hidden = true;
      card.messageBox.textContent = "";
      card.messageBox.classList.remove("highlight");
      return;
    }
    card.messageBox.hidden = false;
    card.messageBox.textContent = text;
    card.messageBox.classList.toggle("highlight", highlight);
  }

  private showFieldError(
    card: Card,
    key: string,
    text: string,
    offset: number,
    message: string,
  ): void {
    const box = card.fieldErrors.get(key);
    if (!box) {
      this.showMessage(card, message);
      return;
    }
    box.hidden = false;
    box.textContent = `${text}\n${" ".repeat(Math.max(0, offset))}^ ${message}`;
  }

  private clearFieldError(card: Card, key: string): void {
    const box = card.fieldErrors.get(key);
    if (box) {
      box.hidden = true;
      box.textContent = "";
    }
  }

  // ---- export panel ----

  private buildExports(card: Card): HTMLElement {
    const row = el("div", "exports");
    const entry = card.entry;
    const add = (label: string, handler: () => void) => row.append(button(label, handler));

    if (entry.type === "curve" || entry.type === "warp" || entry.type === "stitch") {
      add("SVG", () => this.exportArtifact(card, "svg"));
    }
    if (entry.type === "solid") {
      add("SVG", () => this.exportArtifact(card, "svg"));
      add("OBJ", () => this.exportArtifact(card, "obj"));
    }
    if (entry.type === "surface") {
      add("PNG", () => this.exportArtifact(card, "png"));
      add("OBJ", () => {
        this.track(
          this.client
            .surfaceMesh(card.entry, this.render.resolution)
            .then((r) => downloadText(`${card.name}.obj`, r.obj, "model/obj"))
            .catch((err) => this.exportFailed(card, err)),
        );
      });
    }
    if (entry.type === "radial_surface") {
      add("OBJ", () => this.exportArtifact(card, "obj"));
    }
    if (entry.type === "frame") {
      add("CSV", () => this.exportArtifact(card, "csv"));
    }
    add("design.json", () => {
      downloadText("studio.design.json", canonicalJson(this.docJson()), "application/json");
    });
    return row;
  }

  /** Download the exact artifact bytes of the last successful render. */
  private exportArtifact(card: Card, want: Artifact["kind"]): void {
    const artifact = card.artifact;
    if (!artifact) {
      this.showMessage(card, "nothing rendered yet");
      return;
    }
    if (artifact.kind !== want) {
      if (want === "obj" && card.entry.type === "solid") {
        // net preview is up but the user wants the mesh: fetch it verbatim
        this.track(
          this.client
            .solidMesh({ ...(card.entry as SolidEntry), net: false }, undefined)
            .then((r) => downloadText(`${card.name}.obj`, r.obj, "model/obj"))
            .catch((err) => this.exportFailed(card, err)),
        );
        return;
      }
      this.showMessage(card, `current preview is ${artifact.kind}, not ${want}`);
      return;
    }
    const mime =
      want === "svg" ? "image/svg+xml"
      : want === "png" ? "image/png"
      : want === "csv" ? "text/csv"
      : "model/obj";
    if (artifact.kind === "png") {
      downloadBase64(`${card.name}.png`, artifact.base64, mime);
    } else {
      downloadText(`${card.name}.${want}`, artifact.text, mime);
    }
  }

  private exportFailed(card: Card, err: unknown): void {
    if (err instanceof ApiError) this.showMessage(card, err.message);
    else if (isOffline(err)) this.setOffline(true);
  }

  // ---- editors ----

  private buildEditor(card: Card): void {
    card.body.replaceChildren();
    card.fieldErrors.clear();
    const entry = card.entry;
    switch (entry.type) {
      case "curve":
        this.curveEditor(card, entry as CurveEntry);
        break;
      case "warp":
        this.warpEditor(card, entry as WarpEntry);
        break;
      case "surface":
        this.surfaceEditor(card, entry as SurfaceEntry);
        break;
      case "radial_surface":
        this.radialEditor(card, entry as RadialSurfaceEntry);
        break;
      case "stitch":
        this.stitchEditor(card, entry as StitchEntry);
        break;
      case "solid":
        this.solidEditor(card, entry as SolidEntry);
        break;
      case "frame":
        this.frameEditor(card, entry as FrameEntry);
        break;
      default: {
        const pre = el("pre", "opaque-entry");
        pre.textContent = canonicalJson(entry);
        const note = el("div", "hint");
        note.textContent = "This entry type has no editor here; it is preserved as-is.";
        card.body.append(note, pre);
      }
    }
  }

  private formulaField(card: Card, key: string, label: string): HTMLElement {
    const input = document.createElement("input");
    input.type = "text";
    input.className = "formula";
    input.value = String((card.entry as unknown as Record<string, unknown>)[key] ?? "");
    input.addEventListener("input", () => {
      (card.entry as unknown as Record<string, unknown>)[key] = input.value;
      card.dirtyFormulas.add(key);
      this.touch(card);
    });
    const error = el("pre", "formula-error");
    error.hidden = true;
    card.fieldErrors.set(key, error);
    const wrap = el("div", "field-block");
    wrap.append(field(label, input), error);
    return wrap;
  }

  private numberField(card: Card, key: string, label: string, step = 0.1): HTMLElement {
    const input = document.createElement("input");
    input.type = "number";
    input.step = String(step);
    input.value = String((card.entry as unknown as Record<string, unknown>)[key] ?? 0);
    input.addEventListener("input", () => {
      const v = Number(input.value);
      if (!Number.isFinite(v)) return;
      (card.entry as unknown as Record<string, unknown>)[key] = v;
      this.touch(card);
    });
    return field(label, input);
  }

  private intField(card: Card, key: string, label: string): HTMLElement {
    const input = document.createElement("input");
    input.type = "number";
    input.step = "1";
    input.value = String((card.entry as unknown as Record<string, unknown>)[key] ?? 0);
    input.addEventListener("input", () => {
      const v = Number(input.value);
      if (!Number.isInteger(v)) return;
      (card.entry as unknown as Record<string, unknown>)[key] = v;
      this.touch(card);
    });
    return field(label, input);
  }

  private slider(
    card: Card,
    key: string,
    label: string,
    min: number,
    max: number,
    step: number,
  ): HTMLElement {
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(min);
    input.max = String(max);
    input.step = String(step);
    input.value = String((card.entry as unknown as Record<string, unknown>)[key] ?? min);
    const value = el("span", "slider-value");
    value.textContent = input.value;
    input.addEventListener("input", () => {
      const v = Number(input.value);
      value.textContent = input.value;
      (card.entry as unknown as Record<string, unknown>)[key] = v;
      this.touch(card);
    });
    const wrap = el("span", "slider-wrap");
    wrap.append(input, value);
    return field(label, wrap);
  }

  private curveEditor(card: Card, entry: CurveEntry): void {
    const kindSelect = selectInput(["polar", "parametric", "hypocycloid"], entry.kind, (kind) => {
      const { t0, t1, param } = entry;
      let next: CurveEntry;
      if (kind === "polar") next = { ...polarEntry(), t0, t1, param };
      else if (kind === "parametric") next = { ...parametricEntry(), t0, t1, param };
      else next = { ...hypocycloidEntry(), t0, t1, param };
      card.entry = next;
      card.dirtyFormulas.clear();
      this.buildEditor(card);
      this.touch(card);
    });
    card.body.append(field("kind", kindSelect));

    if (entry.kind === "polar") {
      card.body.append(this.formulaField(card, "radius", "r(t)"));
    } else if (entry.kind === "parametric") {
      card.body.append(
        this.formulaField(card, "x", "x(t)"),
        this.formulaField(card, "y", "y(t)"),
      );
    } else {
      card.body.append(
        this.slider(card, "a", "a", 1, 10, 0.1),
        this.slider(card, "b", "b", 1, 10, 0.1),
        this.slider(card, "c", "c", 0, 10, 0.1),
      );
    }
    card.body.append(
      this.numberField(card, "t0", "t0"),
      this.numberField(card, "t1", "t1"),
    );
  }

  private warpEditor(card: Card, entry: WarpEntry): void {
    const curves = [...this.cards.values()]
      .filter((c) => c.entry.type === "curve")
      .map((c) => c.name);
    const options = curves.includes(entry.source) ? curves : [entry.source, ...curves];
    const sourceSelect = selectInput(options, entry.source, (name) => {
      entry.source = name;
      this.touch(card, { pre: true });
    });
    card.body.append(field("source", sourceSelect));

    const kinds = ["exp", "recip_power"];
    if (entry.map.kind === "compose") kinds.push("compose");
    const alphaHost = el("div", "field-block");
    const rebuildAlpha = () => {
      alphaHost.replaceChildren();
      if (entry.map.kind !== "recip_power") return;
      const map = entry.map;
      const max = card.ui.alphaMax ?? 4;
      const input = document.createElement("input");
      input.type = "range";
      input.min = "0";
      input.max = String(max);
      input.step = "0.1";
      input.value = String(map.alpha);
      const value = el("span", "slider-value");
      value.textContent = input.value;
      input.addEventListener("input", () => {
        map.alpha = Number(input.value);
        value.textContent = input.value;
        this.touch(card); // image pane only: the pre-image is untouched
      });
      const wrap = el("span", "slider-wrap");
      wrap.append(input, value);
      alphaHost.append(field("alpha", wrap));
    };
    const kindSelect = selectInput(kinds, entry.map.kind, (kind) => {
      if (kind === "exp") entry.map = { kind: "exp" };
      else if (kind === "recip_power") entry.map = { kind: "recip_power", alpha: 1 };
      rebuildAlpha();
      this.touch(card); // image pane only
    });
    card.body.append(field("map", kindSelect), alphaHost);
    rebuildAlpha();
  }

  private surfaceEditor(card: Card, entry: SurfaceEntry): void {
    card.body.append(this.formulaField(card, "formula", "F(x,y,z)"));
    const boundsRow = el("div", "bounds-row");
    ["x", "y", "z"].forEach((axis, i) => {
      for (const side of [0, 1] as const) {
        const input = document.createElement("input");
        input.type = "number";
        input.step = "0.1";
        input.value = String(entry.bounds[i][side]);
        input.addEventListener("input", () => {
          const v = Number(input.value);
          if (!Number.isFinite(v)) return;
          entry.bounds[i][side] = v;
          this.touch(card);
        });
        boundsRow.append(field(`${axis}${side === 0 ? "lo" : "hi"}`, input));
      }
    });
    card.body.append(boundsRow);

    // fixed-axis turntable: each stop is a fresh service render
    const axisRow = el("div", "axis-row");
    for (const axis of AXES) {
      const b = button(axis, () => {
        card.ui.axis = axis;
        for (const other of axisRow.querySelectorAll("button")) {
          other.classList.toggle("active", other.textContent === axis);
        }
        this.touch(card);
      });
      if ((card.ui.axis ?? "+z") === axis) b.classList.add("active");
      axisRow.append(b);
    }
    card.body.append(field("view", axisRow));
  }

  private radialEditor(card: Card, _entry: RadialSurfaceEntry): void {
    card.body.append(
      this.formulaField(card, "rho", "rho(t,u)"),
      this.numberField(card, "t0", "t0"),
      this.numberField(card, "t1", "t1"),
      this.numberField(card, "u0", "u0"),
      this.numberField(card, "u1", "u1"),
    );
  }

  private stitchEditor(card: Card, entry: StitchEntry): void {
    if (entry.kind === "circle") {
      card.body.append(
        this.slider(card, "pins", "pins", 3, 60, 1),
        this.slider(card, "step", "step", 1, 59, 1),
        this.numberField(card, "radius", "radius"),
      );
      return;
    }
    const railField = (key: "rail_a" | "rail_b", label: string) => {
      const input = document.createElement("input");
      input.type = "text";
      input.className = "formula";
      input.value = (entry[key] ?? []).map(([x, y]) => `${x},${y}`).join("; ");
      input.addEventListener("input", () => {
        const pts: [number, number][] = [];
        for (const chunk of input.value.split(";")) {
          const [x, y] = chunk.split(",").map((s) => Number(s.trim()));
          if (!Number.isFinite(x) || !Number.isFinite(y)) return;
          pts.push([x, y]);
        }
        entry[key] = pts;
        this.touch(card);
      });
      return field(label, input);
    };
    card.body.append(
      railField("rail_a", "rail A"),
      railField("rail_b", "rail B"),
      this.intField(card, "n", "chords"),
      this.checkbox(card, "reverse", "reverse"),
    );
  }

  private solidEditor(card: Card, entry: SolidEntry): void {
    card.body.append(
      field("solid", selectInput(SOLID_NAMES, entry.name, (name) => {
        entry.name = name;
        this.touch(card);
      })),
      this.checkbox(card, "net", "unfold to net"),
      field("spanning", selectInput(SPANNINGS, entry.spanning, (s) => {
        entry.spanning = s;
        this.touch(card);
      })),
      this.checkbox(card, "tabs", "glue tabs"),
    );
  }

  private frameEditor(card: Card, entry: FrameEntry): void {
    const kindSelect = selectInput(["bridge", "dome"], entry.kind, (kind) => {
      const dims = { length: entry.length, width: entry.width, thickness: entry.thickness };
      card.entry = kind === "bridge"
        ? { type: "frame", kind: "bridge", ...dims, n: 5, span: 1.8 }
        : { type: "frame", kind: "dome", ...dims, rings: 1, segments: 8, radius: 4 };
      this.buildEditor(card);
      this.touch(card);
    });
    card.body.append(field("kind", kindSelect));
    if (entry.kind === "bridge") {
      card.body.append(this.intField(card, "n", "struts per side"), this.numberField(card, "span", "span"));
    } else {
      card.body.append(
        this.intField(card, "rings", "rings"),
        this.intField(card, "segments", "segments"),
        this.numberField(card, "radius", "radius"),
      );
    }
    card.body.append(
      this.numberField(card, "length", "strut length"),
      this.numberField(card, "width", "strut width", 0.01),
      this.numberField(card, "thickness", "strut thickness", 0.01),
    );
  }

  private checkbox(card: Card, key: string, label: string): HTMLElement {
    const input = document.createElement("input");
    input.type = "checkbox";
    input.checked = Boolean((card.entry as unknown as Record<string, unknown>)[key]);
    input.addEventListener("change", () => {
      (card.entry as unknown as Record<string, unknown>)[key] = input.checked;
      this.touch(card);
    });
    return field(label, input);
  }
}

// ---- small DOM helpers ----

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}

function button(label: string, onClick: () => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.type = "button";
  b.textContent = label;
  b.addEventListener("click", onClick);
  return b;
}

function field(labelText: string, control: HTMLElement): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  const span = document.createElement("span");
  span.textContent = labelText;
  wrap.append(span, control);
  return wrap;
}

function paneLabel(text: string): HTMLElement {
  const label = el("div", "pane-label");
  label.textContent = text;
  return label;
}

function selectInput(
  options: string[],
  value: string,
  onChange: (value: string) => void,
): HTMLSelectElement {
  const select = document.createElement("select");
  for (const opt of options) {
    const o = document.createElement("option");
    o.value = opt;
    o.textContent = opt;
    select.append(o);
  }
  select.value = value;
  select.addEventListener("change", () => onChange(select.value));
  return select;
}
