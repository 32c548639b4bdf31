/** Checklist panel: one row per assumption, status badge, annotation form,
 * filter by status or classification. */

import type { ChecklistFilter } from "./state";
import type { ChecklistItemDoc, Status } from "./types";

export const STATUSES: Status[] = ["open", "justified", "impossible", "violated"];

export interface ChecklistCallbacks {
  onAnnotate: (branchId: string, status: Status, note: string) => void;
  onSelect: (branchId: string) => void;
}

export function applyFilter(
  items: ChecklistItemDoc[],
  filter: ChecklistFilter,
): ChecklistItemDoc[] {
  return items.filter(
    item =>
      (filter.status === "all" || item.status === filter.status) &&
      (filter.classification === "all" || item.classification === filter.classification),
  );
}

export function renderChecklist(
  host: HTMLElement,
  items: ChecklistItemDoc[],
  filter: ChecklistFilter,
  callbacks: ChecklistCallbacks,
  highlighted: string | null = null,
): void {
  host.innerHTML = "";
  const visible = applyFilter(items, filter);
  if (!visible.length) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = "No assumptions match the current filter.";
    host.appendChild(empty);
    return;
  }
  const list = document.createElement("ol");
  list.className = "checklist";
  for (const item of visible) {
    const row = document.createElement("li");
    row.className = `checklist-item status-${item.status}`;
    row.dataset.branchId = item.id;
    if (item.id === highlighted) row.classList.add("highlight");

    const badge = document.createElement("span");
    badge.className = `badge badge-${item.status}`;
    badge.textContent = item.status;

    const text = document.createElement("span");
    text.className = "statement";
    text.textContent = ` ${item.statement} `;

    const tag = document.createElement("span");
    tag.className = "classification";
    tag.textContent = item.classification;

    row.append(badge, text, tag);
    row.addEventListener("click", () => callbacks.onSelect(item.id));

    const form = document.createElement("form");
    form.className = "annotate";
    const select = document.createElement("select");
    for (const status of STATUSES) {
      const option = document.createElement("option");
      option.value = status;
      option.textContent = status;
      option.selected = status === item.status;
      select.appendChild(option);
    }
    const note = document.createElement("input");
    note.type = "text";
    note.placeholder = "justification note";
    note.value = item.note;
    const save = document.createElement("button");
    save.type = "submit";
    save.textContent = "save";
    form.append(select, note, save);
    form.addEventListener("submit", event => {
      event.preventDefault();
      event.stopPropagation();
      callbacks.onAnnotate(item.id, select.value as Status, note.value);
    });
    form.addEventListener("click", event => event.stopPropagation());
    row.appendChild(form);

    if (item.note) {
      const noteBlock = document.createElement("blockquote");
      noteBlock.className = "note";
      noteBlock.textContent = item.note;
      row.appendChild(noteBlock);
    }
    list.appendChild(row);
  }
  host.appendChild(list);
}
