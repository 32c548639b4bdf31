/** Side-by-side preview of the root versus a branch's realized graph, with
 * the identification evidence and the checklist statement. Read-only. */

import { renderGraph } from "./graph";
import { computeLayout } from "./layout";
import { describeReason, realizeBranch, rootEdges } from "./overlay";
import type { ResultDoc } from "./types";

export interface PreviewCallbacks {
  onAdopt: (branchId: string) => void;
  onClose: () => void;
}

function panel(title: string): { wrap: HTMLElement; svg: SVGSVGElement } {
  const wrap = document.createElement("figure");
  wrap.className = "preview-panel";
  const caption = document.createElement("figcaption");
  caption.textContent = title;
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", "0 0 520 440");
  svg.setAttribute("class", "preview-svg");
  wrap.append(caption, svg);
  return { wrap, svg };
}

export function renderPreview(
  host: HTMLElement,
  doc: ResultDoc,
  branchId: string,
  callbacks: PreviewCallbacks,
): void {
  host.innerHTML = "";
  const realized = realizeBranch(doc, branchId);
  if (!realized) {
    const warning = document.createElement("p");
    warning.className = "stale-warning";
    warning.textContent =
      "This branch is not in the current result; refresh before previewing.";
    host.appendChild(warning);
    return;
  }
  host.classList.add("open");

  const branch =
    doc.exclusions.find(b => b.id === branchId) ??
    doc.misdirections.find(m => m.id === branchId)!;
  const item = doc.checklist.find(i => i.id === branchId);

  const header = document.createElement("header");
  const title = document.createElement("h3");
  title.textContent = item ? item.statement : branchId;
  header.appendChild(title);
  host.appendChild(header);

  const names = doc.root.nodes.map(n => n.name);
  const roleOf = (name: string) =>
    doc.root.nodes.find(n => n.name === name)?.role ?? "latent";

  const panes = document.createElement("div");
  panes.className = "preview-panes";
  const left = panel("root");
  const leftLayout = computeLayout(doc.root.nodes, doc.root.edges);
  renderGraph(left.svg, names, rootEdges(doc), leftLayout, roleOf);

  const right = panel("branch scenario");
  const rightLayout = computeLayout(
    realized.nodes.map(name => doc.root.nodes.find(n => n.name === name) ?? { name }),
    realized.edges.map(e => ({ from: e.from, to: e.to })),
  );
  renderGraph(right.svg, realized.nodes, realized.edges, rightLayout, roleOf);
  panes.append(left.wrap, right.wrap);
  host.appendChild(panes);

  const facts = document.createElement("dl");
  facts.className = "preview-facts";
  const rows: [string, string][] = [
    ["change", realized.changed],
    ["why it matters", `${branch.reason.kind}: ${describeReason(branch.reason)}`],
  ];
  if (item) rows.push(["classification", item.classification]);
  for (const [term, detail] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = term;
    const dd = document.createElement("dd");
    dd.textContent = detail;
    facts.append(dt, dd);
  }
  host.appendChild(facts);

  const actions = document.createElement("div");
  actions.className = "preview-actions";
  const adopt = document.createElement("button");
  adopt.className = "adopt-button";
  adopt.textContent = "adopt this branch";
  adopt.addEventListener("click", () => callbacks.onAdopt(branchId));
  const close = document.createElement("button");
  close.textContent = "close";
  close.addEventListener("click", () => callbacks.onClose());
  actions.append(adopt, close);
  host.appendChild(actions);
}
