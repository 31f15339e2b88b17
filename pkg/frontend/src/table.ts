// Table view: artifacts tab (search/filter/sort delegated to /search) and a
// links tab for managing trace links and their review status. Review
// actions wait for server confirmation; there are no optimistic updates.

import type { ApiClient } from "./api.js";
import type { Artifact, TraceLink } from "./types.js";

export interface TableCallbacks {
  onSelect?: (artifactId: string) => void;
  onLinksChanged?: () => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderArtifactRows(
  tbody: HTMLTableSectionElement,
  rows: Artifact[],
  callbacks: TableCallbacks,
): void {
  const doc = tbody.ownerDocument;
  tbody.innerHTML = "";
  for (const artifact of rows) {
    const tr = el(doc, "tr", "artifact-row");
    tr.dataset.id = artifact.id;
    tr.appendChild(el(doc, "td", "col-id", artifact.id));
    tr.appendChild(el(doc, "td", "col-type", artifact.type));
    tr.appendChild(el(doc, "td", "col-name", artifact.name));
    tr.appendChild(
      el(doc, "td", "col-score", artifact.score !== undefined ? artifact.score.toFixed(3) : ""),
    );
    tr.appendChild(el(doc, "td", "col-flag", artifact.flagged ? "⚑" : ""));
    tr.addEventListener("click", () => callbacks.onSelect?.(artifact.id));
    tbody.appendChild(tr);
  }
}

export function renderLinkRows(
  tbody: HTMLTableSectionElement,
  links: TraceLink[],
  api: ApiClient,
  callbacks: TableCallbacks,
): void {
  const doc = tbody.ownerDocument;
  tbody.innerHTML = "";
  for (const link of links) {
    const tr = el(doc, "tr", `link-row link-${link.status}`);
    tr.dataset.child = link.childId;
    tr.dataset.parent = link.parentId;
    tr.appendChild(el(doc, "td", "col-child", link.childId));
    tr.appendChild(el(doc, "td", "col-parent", link.parentId));
    tr.appendChild(
      el(doc, "td", "col-score", link.score !== undefined ? link.score.toFixed(3) : ""),
    );
    const statusCell = el(doc, "td", "col-status", link.status);
    tr.appendChild(statusCell);
    tr.appendChild(el(doc, "td", "col-explanation", link.explanation ?? ""));

    const actions = el(doc, "td", "col-actions");
    if (link.status === "pending") {
      for (const decision of ["approve", "reject"] as const) {
        const button = el(doc, "button", `btn-${decision}`, decision);
        button.addEventListener("click", async (event) => {
          event.stopPropagation();
          button.disabled = true;
          try {
            const result = await api.reviewLink(link.childId, link.parentId, decision);
            // server confirmed: restyle the row in place, then notify
            statusCell.textContent = result.link.status;
            tr.className = `link-row link-${result.link.status}`;
            actions.innerHTML = "";
            callbacks.onLinksChanged?.();
          } catch (error) {
            button.disabled = false;
            showRowError(tr, error);
          }
        });
        actions.appendChild(button);
      }
    }
    tr.appendChild(actions);
    tbody.appendChild(tr);
  }
}

function showRowError(tr: HTMLTableRowElement, error: unknown): void {
  const doc = tr.ownerDocument;
  const note = el(doc, "div", "row-error");
  note.textContent = error instanceof Error ? error.message : String(error);
  tr.lastElementChild?.appendChild(note);
}
