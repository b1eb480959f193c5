/**
 * Studio behavior against the mocked service.
 *
 * The canvas guard below is load-bearing: every preview in these tests is
 * painted from verbatim service bytes, and any attempt to rasterize locally
 * throws. Timers are faked (setTimeout only) so debounce windows are exact.
 */

import { afterEach, beforeAll, beforeEach, describe, expect, test, vi } from "vitest";

import { Client } from "../src/api";
import {
  bridgeFrameEntry,
  canonicalJson,
  polarEntry,
  ROSETTE,
  TWO_PI,
} from "../src/model";
import type { CurveEntry, Entry } from "../src/model";
import { Studio } from "../src/studio";
import type { StorageLike } from "../src/studio";
import { MockService, NET_SVG, ROSETTE_SVG } from "./mock";

const downloads: Blob[] = [];

beforeAll(() => {
  // Previews are verbatim service artifacts; the studio must never draw
  // geometry itself. Any canvas use under test is an instant failure.
  Object.defineProperty(HTMLCanvasElement.prototype, "getContext", {
    value: () => {
      throw new Error("client-side drawing is forbidden");
    },
  });
  // No object URLs in jsdom: capture the blobs handed to the browser instead.
  Object.defineProperty(URL, "createObjectURL", {
    value: (blob: Blob) => {
      downloads.push(blob);
      return "blob:mock-url";
    },
  });
  Object.defineProperty(URL, "revokeObjectURL", { value: () => {} });
  Object.defineProperty(HTMLAnchorElement.prototype, "click", { value: () => {} });
});

let mock: MockService;
let storage: StorageLike;

beforeEach(() => {
  vi.useFakeTimers({ toFake: ["setTimeout", "clearTimeout"] });
  mock = new MockService();
  storage = memStorage();
  downloads.length = 0;
  document.body.innerHTML = "";
});

afterEach(() => {
  vi.useRealTimers();
});

function memStorage(): StorageLike {
  const map = new Map<string, string>();
  return {
    getItem: (key) => map.get(key) ?? null,
    setItem: (key, value) => void map.set(key, value),
  };
}

function makeStudio(into?: StorageLike): Studio {
  const root = document.createElement("div");
  document.body.append(root);
  const client = new Client("http://service.test", mock.fetch);
  return new Studio(root, client, into ?? storage, { debounceMs: 150 });
}

/** Run the debounce window, then wait for every in-flight render. */
async function settle(studio: Studio): Promise<void> {
  for (let round = 0; round < 2; round++) {
    await vi.advanceTimersByTimeAsync(151);
    await studio.idle();
  }
}

/** Drain microtasks and immediates without advancing faked timers. */
async function flushIo(rounds = 5): Promise<void> {
  for (let i = 0; i < rounds; i++) {
    await new Promise((resolve) => setImmediate(resolve));
  }
}

function cardRoot(studio: Studio, name: string): HTMLElement {
  const card = studio.cards.get(name);
  if (!card) throw new Error(`no card named ${name}`);
  return card.root;
}

function formulaInput(studio: Studio, name: string, index = 0): HTMLInputElement {
  const inputs = cardRoot(studio, name).querySelectorAll<HTMLInputElement>("input.formula");
  if (!inputs[index]) throw new Error(`card ${name} has no formula input ${index}`);
  return inputs[index];
}

function type(input: HTMLInputElement, text: string): void {
  input.value = text;
  input.dispatchEvent(new Event("input"));
}

function clickExport(studio: Studio, name: string, label: string): void {
  const buttons = cardRoot(studio, name).querySelectorAll<HTMLButtonElement>(".exports button");
  const match = [...buttons].find((b) => b.textContent === label);
  if (!match) throw new Error(`card ${name} has no ${label} export`);
  match.click();
}

async function blobText(blob: Blob): Promise<string> {
  if (typeof blob.text === "function") return blob.text();
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(String(reader.result));
    reader.onerror = () => reject(reader.error);
    reader.readAsText(blob);
  });
}

describe("live preview", () => {
  test("typing the rosette formula renders the exact SVG the service returned", async () => {
    const studio = makeStudio();
    studio.addEntry("rose", polarEntry("1"));
    await settle(studio);

    type(formulaInput(studio, "rose"), ROSETTE);
    await settle(studio);

    const card = studio.cards.get("rose")!;
    expect(card.artifact).toEqual({ kind: "svg", text: ROSETTE_SVG });
    expect(card.preview.querySelector("svg")).not.toBeNull();
    expect(card.badge.hidden).toBe(true);
    expect(card.messageBox.hidden).toBe(true);
  });

  test("a parse error is shown inline at its offset without clearing the preview", async () => {
    const studio = makeStudio();
    studio.addEntry("rose", polarEntry());
    await settle(studio);
    const card = studio.cards.get("rose")!;
    const good = card.preview.innerHTML;
    expect(good).toContain("<svg");

    type(formulaInput(studio, "rose"), "sin(");
    await settle(studio);

    const box = cardRoot(studio, "rose").querySelector<HTMLElement>(".formula-error")!;
    expect(box.hidden).toBe(false);
    const lines = box.textContent!.split("\n");
    expect(lines[0]).toBe("sin(");
    expect(lines[1].indexOf("^")).toBe(4); // caret sits under the reported offset
    expect(lines[1]).toContain("unexpected end of input");

    expect(card.preview.innerHTML).toBe(good); // last good render stays up
    expect(card.badge.hidden).toBe(false); // but it is marked stale

    // fixing the formula clears the error and repaints
    type(formulaInput(studio, "rose"), "sin(2*t)");
    await settle(studio);
    expect(box.hidden).toBe(true);
    expect(card.badge.hidden).toBe(true);
    expect(card.preview.querySelector("desc")!.textContent).toContain("sin(2*t)");
  });

  test("fast edits coalesce into a single request", async () => {
    const studio = makeStudio();
    studio.addEntry("rose", polarEntry());
    await settle(studio);
    mock.calls = [];

    type(formulaInput(studio, "rose"), "1 + t");
    await vi.advanceTimersByTimeAsync(50); // inside the debounce window
    type(formulaInput(studio, "rose"), "2 + t");
    await settle(studio);

    expect(mock.callsTo("/api/parse").length).toBe(1);
    expect(mock.callsTo("/api/curve").length).toBe(1);
    expect(mock.callsTo("/api/curve")[0].body.entry.radius).toBe("2 + t");
  });

  test("slider drags coalesce and update the design values", async () => {
    const studio = makeStudio();
    studio.addEntry("gear", {
      type: "curve",
      kind: "hypocycloid",
      param: "t",
      t0: 0,
      t1: TWO_PI,
      a: 5,
      b: 3,
      c: 5,
    });
    await settle(studio);
    mock.calls = [];

    const slider = cardRoot(studio, "gear").querySelectorAll<HTMLInputElement>(
      "input[type=range]",
    )[1]; // b
    for (const v of ["3.5", "4", "4.5", "5"]) {
      slider.value = v;
      slider.dispatchEvent(new Event("input"));
      await vi.advanceTimersByTimeAsync(40);
    }
    await settle(studio);

    expect(mock.callsTo("/api/parse").length).toBe(0); // no formulas here
    expect(mock.callsTo("/api/curve").length).toBe(1);
    expect((studio.cards.get("gear")!.entry as CurveEntry).b).toBe(5);
    const bubbles = cardRoot(studio, "gear").querySelectorAll(".slider-value");
    expect(bubbles[1].textContent).toBe("5");
  });

  test("the latest edit wins even when responses arrive out of order", async () => {
    const studio = makeStudio();
    studio.addEntry("rose", polarEntry());
    await settle(studio);
    mock.calls = [];
    mock.respectAbort = false; // the stale response was already on the wire
    mock.gateWhen = (path) => path === "/api/curve";

    type(formulaInput(studio, "rose"), "1 + t");
    await vi.advanceTimersByTimeAsync(151);
    await flushIo();
    type(formulaInput(studio, "rose"), "2 + t");
    await vi.advanceTimersByTimeAsync(151);
    await flushIo();

    expect(mock.callsTo("/api/curve").length).toBe(2);
    expect(mock.held.length).toBe(2);

    mock.release(1); // newest answer lands first
    await flushIo();
    mock.release(0); // stale answer limps in afterwards
    await flushIo();
    await studio.idle();

    const card = studio.cards.get("rose")!;
    const desc = card.preview.querySelector("desc")!;
    expect(desc.textContent).toContain("2 + t");
    expect(desc.textContent).not.toContain("1 + t");
    expect(card.badge.hidden).toBe(true); // the shown render matches the params
  });

  test("aborted requests are dropped quietly when the service honors cancellation", async () => {
    const studio = makeStudio();
    studio.addEntry("rose", polarEntry());
    await settle(studio);
    mock.calls = [];
    mock.gateWhen = (path) => path === "/api/curve";

    type(formulaInput(studio, "rose"), "1 + t");
    await vi.advanceTimersByTimeAsync(151);
    await flushIo();
    expect(mock.held.length).toBe(1);

    // the second render aborts the held request before issuing its own
    type(formulaInput(studio, "rose"), "2 + t");
    await vi.advanceTimersByTimeAsync(151);
    await flushIo();
    expect(mock.held.length).toBe(1);

    mock.releaseAll();
    await flushIo();
    await studio.idle();

    const desc = studio.cards.get("rose")!.preview.querySelector("desc")!;
    expect(desc.textContent).toContain("2 + t");
  });

  test("a service outage shows the banner, keeps editing alive, and recovers", async () => {
    const studio = makeStudio();
    studio.addEntry("rose", polarEntry());
    await settle(studio);
    const card = studio.cards.get("rose")!;
    const shownSha = card.sha;
    const banner = document.querySelector<HTMLElement>(".offline-banner")!;
    expect(banner.hidden).toBe(true);

    mock.offline = true;
    type(formulaInput(studio, "rose"), "1 + t");
    await settle(studio);
    expect(banner.hidden).toBe(false);
    expect(card.sha).toBe(shownSha); // old preview still up
    expect(card.badge.hidden).toBe(false);

    // editing keeps working while the service is down
    type(formulaInput(studio, "rose"), "2 + t");
    await settle(studio);
    expect((card.entry as CurveEntry).radius).toBe("2 + t");

    mock.offline = false;
    type(formulaInput(studio, "rose"), "3 + t");
    await settle(studio);
    expect(banner.hidden).toBe(true);
    expect(card.badge.hidden).toBe(true);
    expect(card.preview.querySelector("desc")!.textContent).toContain("3 + t");
  });
});

describe("warp pipeline", () => {
  test("map edits re-render the image pane only, and alpha 0 surfaces the service message", async () => {
    const studio = makeStudio();
    studio.addEntry("rose", polarEntry());
    studio.addEntry("swirl", { type: "warp", source: "rose", map: { kind: "exp" } });
    await settle(studio);

    const swirl = studio.cards.get("swirl")!;
    expect(swirl.prePane!.querySelector("svg")).not.toBeNull(); // pre-image pane is live

    mock.calls = [];
    const selects = cardRoot(studio, "swirl").querySelectorAll<HTMLSelectElement>("select");
    const mapKind = selects[1];
    mapKind.value = "recip_power";
    mapKind.dispatchEvent(new Event("change"));
    await settle(studio);

    expect(mock.callsTo("/api/map").length).toBe(1);
    expect(mock.callsTo("/api/curve").length).toBe(0); // pre-image untouched
    expect(mock.callsTo("/api/map")[0].body.map).toEqual({ kind: "recip_power", alpha: 1 });

    const alpha = cardRoot(studio, "swirl").querySelector<HTMLInputElement>("input[type=range]")!;
    const goodImage = swirl.preview.innerHTML;
    alpha.value = "0";
    alpha.dispatchEvent(new Event("input"));
    await settle(studio);

    expect(swirl.messageBox.hidden).toBe(false);
    expect(swirl.messageBox.textContent).toContain("degenerate");
    expect(swirl.messageBox.classList.contains("highlight")).toBe(true);
    expect(swirl.preview.innerHTML).toBe(goodImage); // last good image stays
    expect(swirl.badge.hidden).toBe(false);
  });

  test("editing the source curve refreshes the dependent pre-image", async () => {
    const studio = makeStudio();
    studio.addEntry("rose", polarEntry());
    studio.addEntry("swirl", { type: "warp", source: "rose", map: { kind: "exp" } });
    await settle(studio);
    mock.calls = [];

    type(formulaInput(studio, "rose"), "1 + t");
    await settle(studio);

    // one render for the curve card, one pre-image fetch plus the map call
    expect(mock.callsTo("/api/curve").length).toBe(2);
    expect(mock.callsTo("/api/map").length).toBe(1);
    const pre = studio.cards.get("swirl")!.prePane!.querySelector("desc")!;
    expect(pre.textContent).toContain("1 + t");
  });
});

describe("state round trips", () => {
  test("save then load reproduces the document and the render hashes", async () => {
    const studio = makeStudio();
    studio.addEntry("rose", polarEntry());
    studio.addEntry("burst", {
      type: "stitch",
      kind: "circle",
      pins: 24,
      step: 9,
      radius: 1,
    });
    await settle(studio);
    const hashesBefore = studio.hashes();
    expect(Object.keys(hashesBefore).sort()).toEqual(["burst", "rose"]);
    studio.save();

    const twin = makeStudio(); // same storage, fresh DOM
    expect(twin.load()).toBe(true);
    await settle(twin);

    expect(twin.hashes()).toEqual(hashesBefore);
    expect(canonicalJson(twin.docJson())).toBe(canonicalJson(studio.docJson()));
  });

  test("entries with no editor are preserved verbatim through save and load", async () => {
    const studio = makeStudio();
    const lens: Entry = { type: "map", kind: "recip_power", alpha: 2 };
    studio.addEntry("lens", lens);
    await settle(studio);

    const card = studio.cards.get("lens")!;
    expect(cardRoot(studio, "lens").querySelector(".opaque-entry")).not.toBeNull();
    expect(card.messageBox.textContent).toContain("no preview");

    studio.save();
    const twin = makeStudio();
    expect(twin.load()).toBe(true);
    await settle(twin);
    expect(canonicalJson(twin.cards.get("lens")!.entry)).toBe(canonicalJson(lens));
  });

  test("loading from empty storage reports nothing saved", () => {
    const studio = makeStudio();
    expect(studio.load()).toBe(false);
  });
});

describe("export panel", () => {
  test("exports hand over exactly the bytes the service returned", async () => {
    const studio = makeStudio();
    studio.addEntry("rose", polarEntry());
    await settle(studio);

    clickExport(studio, "rose", "SVG");
    expect(downloads.length).toBe(1);
    expect(await blobText(downloads[0])).toBe(ROSETTE_SVG);
    expect(downloads[0].type).toBe("image/svg+xml");

    clickExport(studio, "rose", "design.json");
    const text = await blobText(downloads.at(-1)!);
    expect(text).toBe(canonicalJson(studio.docJson()));
    const parsed = JSON.parse(text);
    expect(parsed.version).toBe(1);
    expect(parsed.entries.rose.radius).toBe(ROSETTE);
  });

  test("a net preview still exports the mesh OBJ on demand", async () => {
    const studio = makeStudio();
    studio.addEntry("box", {
      type: "solid",
      name: "dodecahedron",
      net: true,
      spanning: "default",
      tabs: false,
    });
    await settle(studio);
    const card = studio.cards.get("box")!;
    expect(card.artifact).toEqual({ kind: "svg", text: NET_SVG });

    clickExport(studio, "box", "SVG");
    expect(await blobText(downloads.at(-1)!)).toBe(NET_SVG);

    clickExport(studio, "box", "OBJ"); // fetched fresh: the preview is a net
    await studio.idle();
    await flushIo();
    const obj = await blobText(downloads.at(-1)!);
    expect(obj.startsWith("# mock solid")).toBe(true);
    expect(mock.callsTo("/api/solid").at(-1)!.body.entry.net).toBe(false);
  });

  test("frame cards export the cut list as returned", async () => {
    const studio = makeStudio();
    studio.addEntry("web", bridgeFrameEntry());
    await settle(studio);

    clickExport(studio, "web", "CSV");
    const csv = await blobText(downloads.at(-1)!);
    expect(csv.startsWith("class,count,gap,length")).toBe(true);
    const artifact = studio.cards.get("web")!.artifact!;
    expect(artifact.kind).toBe("csv");
    expect(csv).toBe((artifact as { kind: "csv"; text: string }).text);
  });
});

describe("the whole shelf", () => {
  test("every entry type renders a preview without drawing client-side", async () => {
    const studio = makeStudio();
    const adders = [...document.querySelectorAll<HTMLButtonElement>(".toolbar button")].filter(
      (b) => b.textContent!.startsWith("+ "),
    );
    expect(adders.length).toBe(9);
    for (const adder of adders) adder.click();
    await settle(studio);

    expect(studio.cards.size).toBe(9);
    for (const [name, card] of studio.cards) {
      expect(card.preview.querySelector("svg, img, pre"), name).not.toBeNull();
      expect(card.badge.hidden, name).toBe(true);
      expect(card.messageBox.hidden, name).toBe(true);
    }

    // the surface preview is a service raster, not a local drawing
    const surface = [...studio.cards.values()].find((c) => c.entry.type === "surface")!;
    const img = surface.preview.querySelector("img")!;
    expect(img.src.startsWith("data:image/png;base64,")).toBe(true);
  });

  test("switching curve kind rebuilds the editor and keeps the window", async () => {
    const studio = makeStudio();
    studio.addEntry("c", polarEntry());
    await settle(studio);

    const nums = cardRoot(studio, "c").querySelectorAll<HTMLInputElement>("input[type=number]");
    type(nums[1], "3"); // t1
    const kind = cardRoot(studio, "c").querySelector<HTMLSelectElement>("select")!;
    kind.value = "parametric";
    kind.dispatchEvent(new Event("change"));
    await settle(studio);

    const entry = studio.cards.get("c")!.entry as CurveEntry;
    expect(entry.kind).toBe("parametric");
    expect(entry.t1).toBe(3);
    expect(entry.x).toBe("cos(t)");
    expect(cardRoot(studio, "c").querySelectorAll("input.formula").length).toBe(2);
    expect(studio.cards.get("c")!.preview.querySelector("desc")!.textContent).toContain("cos(t)");
  });

  test("removing a card forgets it", async () => {
    const studio = makeStudio();
    studio.addEntry("rose", polarEntry());
    await settle(studio);
    studio.removeCard("rose");
    expect(studio.cards.has("rose")).toBe(false);
    expect(document.querySelector(".card")).toBeNull();
    expect(studio.docJson().entries).toEqual({});
  });
});
