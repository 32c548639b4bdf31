/** DOM wiring: loader form, overlay view, preview drawer, checklist panel. */

import { Client } from "./api";
import { renderChecklist } from "./checklist";
import { SessionController } from "./controller";
import { renderGraph } from "./graph";
import { computeLayout } from "./layout";
import { overlayEdges, rootEdges } from "./overlay";
import { renderPreview } from "./preview";
import { Store } from "./state";
import type { AdoptOptions, ResultDoc } from "./types";
import "./style.css";

const SAMPLE = `dag {
  A [exposure]
  Y [outcome]
  L [adjusted]
  K [omitted]
  L -> A
  L -> Y
  A -> Y
  K -> A
  K -> Y
}
`;

const serviceBase =
  new URLSearchParams(location.search).get("service") ?? "http://127.0.0.1:8000";

const store = new Store();
const controller = new SessionController(new Client(serviceBase), store);

const app = document.querySelector<HTMLDivElement>("#app")!;
app.innerHTML = `
  <header class="topbar">
    <h1>DAG assumption audit</h1>
    <div class="controls">
      <button id="toggle-mode"></button>
      <button id="undo">undo</button>
      <label class="filter">status
        <select id="filter-status">
          <option value="all">all</option>
          <option value="open">open</option>
          <option value="justified">justified</option>
          <option value="impossible">impossible</option>
          <option value="violated">violated</option>
        </select>
      </label>
      <span id="banner" class="banner"></span>
    </div>
  </header>
  <section id="loader" class="loader">
    <p>Paste the root graph implied by your analysis:</p>
    <textarea id="dag-text" rows="12" spellcheck="false"></textarea>
    <button id="load">audit</button>
    <pre id="load-error" class="error"></pre>
  </section>
  <main class="workspace" hidden>
    <svg id="graph" viewBox="0 0 520 440"></svg>
    <aside>
      <div id="preview" class="preview"></div>
      <div id="checklist"></div>
    </aside>
  </main>
`;

const els = {
  loader: app.querySelector<HTMLElement>("#loader")!,
  dagText: app.querySelector<HTMLTextAreaElement>("#dag-text")!,
  loadButton: app.querySelector<HTMLButtonElement>("#load")!,
  loadError: app.querySelector<HTMLPreElement>("#load-error")!,
  workspace: app.querySelector<HTMLElement>("main")!,
  graph: app.querySelector<SVGSVGElement>("#graph")!,
  preview: app.querySelector<HTMLDivElement>("#preview")!,
  checklist: app.querySelector<HTMLDivElement>("#checklist")!,
  toggle: app.querySelector<HTMLButtonElement>("#toggle-mode")!,
  undo: app.querySelector<HTMLButtonElement>("#undo")!,
  filterStatus: app.querySelector<HTMLSelectElement>("#filter-status")!,
  banner: app.querySelector<HTMLSpanElement>("#banner")!,
};

els.dagText.value = SAMPLE;

function askAdoptOptions(doc: ResultDoc, branchId: string): AdoptOptions | null {
  const exclusion = doc.exclusions.find(b => b.id === branchId);
  if (!exclusion) {
    return confirm("Adopt this branch as the new root?") ? {} : null;
  }
  if (exclusion.pathway_kind === "directed") {
    return confirm("Adopt this direct pathway into the root?") ? {} : null;
  }
  const name = prompt(
    "Name for the common-cause node (blank keeps the first known member or auto-names):",
    exclusion.known_members[0] ?? "",
  );
  if (name === null) return null;
  const leave = confirm(
    "OK: adjust for the new node (models measuring it).\nCancel: record it as a known omitted pathway instead.",
  );
  const options: AdoptOptions = {};
  if (name.trim()) options.name = name.trim();
  if (!leave) options.leave_unadjusted = true;
  return options;
}

async function adoptFlow(branchId: string): Promise<void> {
  const doc = store.get().result;
  if (!doc || store.get().pending) return;
  const options = askAdoptOptions(doc, branchId);
  if (options === null) return;
  await controller.adoptAndRefresh(branchId, options);
}

function render(): void {
  const state = store.get();
  els.banner.textContent = state.banner ?? "";
  els.toggle.textContent = state.mode === "collapsed" ? "expand overlay" : "collapse overlay";
  els.undo.disabled = state.pending;
  if (!state.result) {
    els.loader.hidden = false;
    els.workspace.hidden = true;
    return;
  }
  els.loader.hidden = true;
  els.workspace.hidden = false;

  const doc = state.result;
  const names = doc.root.nodes.map(n => n.name);
  const roleOf = (name: string) =>
    doc.root.nodes.find(n => n.name === name)?.role ?? "latent";
  const layout = computeLayout(doc.root.nodes, doc.root.edges);
  renderGraph(
    els.graph,
    names,
    [...rootEdges(doc), ...overlayEdges(doc, state.mode)],
    layout,
    roleOf,
    {
      onHover: refs => highlightChecklist(refs),
      onLeave: () => highlightChecklist([]),
      onSelect: refs => store.select(refs[0] ?? null),
    },
    state.selectedBranch,
  );

  if (state.selectedBranch) {
    renderPreview(els.preview, doc, state.selectedBranch, {
      onAdopt: id => void adoptFlow(id),
      onClose: () => store.select(null),
    });
  } else {
    els.preview.innerHTML = "";
    els.preview.classList.remove("open");
  }

  renderChecklist(
    els.checklist,
    doc.checklist,
    state.filter,
    {
      onAnnotate: (id, status, note) => void controller.annotate(id, status, note),
      onSelect: id => store.select(id),
    },
    state.selectedBranch,
  );
}

function highlightChecklist(refs: string[]): void {
  for (const row of els.checklist.querySelectorAll<HTMLElement>(".checklist-item")) {
    row.classList.toggle("hover", refs.includes(row.dataset.branchId ?? ""));
  }
}

store.subscribe(render);
render();

els.loadButton.addEventListener("click", async () => {
  els.loadError.textContent = "";
  try {
    await controller.loadDagText(els.dagText.value);
  } catch (error) {
    els.loadError.textContent = String(error);
  }
});
els.toggle.addEventListener("click", () => store.toggleMode());
els.undo.addEventListener("click", () => void controller.undo());
els.filterStatus.addEventListener("change", () =>
  store.setFilter({ status: els.filterStatus.value as never }),
);
