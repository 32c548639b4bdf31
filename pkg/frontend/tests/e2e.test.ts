// @vitest-environment jsdom
/** End-to-end: the UI drives a real service process, adopts a branch, checks
 * the rendered branch set against a direct CLI audit of the adopted root,
 * and verifies an annotation survives a reload. */
import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Client } from "../src/api";
import { SessionController } from "../src/controller";
import { renderGraph } from "../src/graph";
import { computeLayout } from "../src/layout";
import { overlayEdges, rootEdges } from "../src/overlay";
import { Store } from "../src/state";
import { branchCount, branchIds, type ResultDoc } from "../src/types";

const PORT = 18000 + (process.pid % 2000);
const BASE = `http://127.0.0.1:${PORT}`;
const FIXTURES = join(__dirname, "fixtures");
const PYTHON = process.env.PYTHON ?? "python3";

let server: ChildProcess;
let workdir: string;

function cli(...args: string[]): string {
  return execFileSync(PYTHON, ["-m", "dagaudit.cli", ...args], {
    cwd: workdir,
    encoding: "utf-8",
  });
}

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const r = await fetch(`${BASE}/sessions/probe`);
      if (r.status === 404) return;
    } catch {
      // not up yet
    }
    await new Promise(resolve => setTimeout(resolve, 250));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "dagaudit-ui-"));
  writeFileSync(join(workdir, "confounder.dag"), readFileSync(join(FIXTURES, "confounder.dag")));
  server = spawn(PYTHON, ["-m", "dagaudit.cli", "serve", "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

describe("analyst loop against a live service", () => {
  it("loads the confounder fixture, adopts the mediator flip, and matches the CLI", async () => {
    const store = new Store();
    const controller = new SessionController(new Client(BASE), store);
    await controller.loadDagText(readFileSync(join(FIXTURES, "confounder.dag"), "utf-8"));

    const doc = store.get().result!;
    expect(branchCount(doc)).toBe(5);

    const mediatorFlip = doc.misdirections.find(
      m => JSON.stringify(m.flips) === JSON.stringify([["L", "A"]]),
    )!;
    expect(await controller.adoptAndRefresh(mediatorFlip.id)).toBe(true);
    const adoptedDoc = store.get().result!;
    expect(adoptedDoc.generation).toBe(1);

    // the same adoption through the CLI, then a direct audit of the new root
    cli("adopt", "confounder.dag", "--branch", mediatorFlip.id, "--out", "adopted.dag");
    const audited = JSON.parse(cli("audit", "adopted.dag")) as ResultDoc;
    expect(new Set(branchIds(adoptedDoc))).toEqual(new Set(branchIds(audited)));
    expect(audited.root.edges).toEqual(adoptedDoc.root.edges);

    // rendered branch set matches the document in both modes
    for (const mode of ["expanded", "collapsed"] as const) {
      const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
      const names = adoptedDoc.root.nodes.map(n => n.name);
      renderGraph(
        svg,
        names,
        [...rootEdges(adoptedDoc), ...overlayEdges(adoptedDoc, mode)],
        computeLayout(adoptedDoc.root.nodes, adoptedDoc.root.edges),
        () => "adjusted",
      );
      const rendered = svg.querySelectorAll(".edge-exclusion, .edge-misdirection").length;
      if (mode === "expanded") {
        expect(rendered).toBe(branchCount(adoptedDoc));
      } else {
        expect(rendered).toBe(overlayEdges(adoptedDoc, "collapsed").length);
      }
      expect(svg.querySelectorAll(".edge-root")).toHaveLength(adoptedDoc.root.edges.length);
    }
  });

  it("annotations persist across a reload", async () => {
    const store = new Store();
    const controller = new SessionController(new Client(BASE), store);
    await controller.loadDagText(readFileSync(join(FIXTURES, "confounder.dag"), "utf-8"));
    const doc = store.get().result!;
    const target = doc.exclusions[0].id;

    expect(
      await controller.annotate(target, "justified", "bounded by sensitivity analysis"),
    ).toBe(true);
    const updated = store.get().result!.checklist.find(i => i.id === target)!;
    expect(updated.status).toBe("justified");

    // a fresh controller on the same session id simulates a page reload
    const reloadedStore = new Store();
    const reloaded = new SessionController(new Client(BASE), reloadedStore);
    reloadedStore.loadSession(store.get().sessionId!, doc);
    await reloaded.refresh();
    const item = reloadedStore.get().result!.checklist.find(i => i.id === target)!;
    expect(item.status).toBe("justified");
    expect(item.note).toBe("bounded by sensitivity analysis");
  });

  it("undo returns the session to the original root", async () => {
    const store = new Store();
    const controller = new SessionController(new Client(BASE), store);
    await controller.loadDagText(readFileSync(join(FIXTURES, "confounder.dag"), "utf-8"));
    const before = JSON.stringify(store.get().result!.root);
    const anyFlip = store.get().result!.misdirections[0];
    await controller.adoptAndRefresh(anyFlip.id);
    expect(JSON.stringify(store.get().result!.root)).not.toBe(before);
    expect(await controller.undo()).toBe(true);
    expect(JSON.stringify(store.get().result!.root)).toBe(before);
  });

  it("a stale adopt is refused and the view refreshes", async () => {
    const store = new Store();
    const controller = new SessionController(new Client(BASE), store);
    await controller.loadDagText(readFileSync(join(FIXTURES, "confounder.dag"), "utf-8"));
    const doc = store.get().result!;
    const flip = doc.misdirections[0];

    // another client (a second tab) moves the session forward
    const other = new Client(BASE);
    await other.adopt(store.get().sessionId!, doc.misdirections[1].id, 0);

    expect(await controller.adoptAndRefresh(flip.id)).toBe(false);
    expect(store.get().banner).toContain("confirm again");
    expect(store.get().result!.generation).toBe(1);
  });
});
