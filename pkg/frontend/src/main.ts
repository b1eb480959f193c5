import { Client } from "./api";
import { Studio } from "./studio";
import "./style.css";

// Same-origin by default so a reverse proxy works; override with
// ?service=http://host:port when the service runs elsewhere.
const params = new URLSearchParams(window.location.search);
const base = params.get("service") ?? "http://127.0.0.1:8787";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const client = new Client(base, (input, init) => window.fetch(input, init));
const studio = new Studio(root, client, window.localStorage);

// restore the last session if there is one, otherwise start with a rosette
if (!studio.load()) {
  studio.addEntry("rose", {
    type: "curve",
    kind: "polar",
    param: "t",
    t0: 0,
    t1: 2 * Math.PI,
    radius: "sin(4*t)^2 + cos(4*t)",
  });
}
