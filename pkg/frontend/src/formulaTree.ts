/** Interactive formula tree: every node is clickable and carries its path;
 * the current selection is highlighted; skolem argument display toggles. */

import type { EntryJson, TreeNode } from "./api.js";
import type { PanelState } from "./state.js";
import { panelTitle } from "./state.js";

function nodeLabel(node: TreeNode, skolemArgs: boolean): string {
  if (skolemArgs || (node.kind !== "term" && node.kind !== "atom")) {
    return node.label;
  }
  // display-suppressed skolem applications: drop the balanced argument list
  // after each `$(`
  let out = "";
  let i = 0;
  const s = node.label;
  while (i < s.length) {
    if (s[i] === "$" && s[i + 1] === "(") {
      out += "$";
      let depth = 0;
      i += 1;
      do {
        if (s[i] === "(") depth += 1;
        if (s[i] === ")") depth -= 1;
        i += 1;
      } while (i < s.length && depth > 0);
    } else {
      out += s[i];
      i += 1;
    }
  }
  return out;
}

function renderNode(
  node: TreeNode,
  state: PanelState,
  onSelect: (path: string) => void,
): HTMLElement {
  const el = document.createElement("div");
  el.className = "fnode";
  el.dataset.path = node.path;
  const label = document.createElement("span");
  label.className = "flabel";
  label.textContent = nodeLabel(node, state.skolemArgsVisible);
  if (node.path === state.selectedPath) {
    el.classList.add("selected");
  }
  label.addEventListener("click", (ev) => {
    ev.stopPropagation();
    onSelect(node.path);
  });
  el.appendChild(label);
  if (node.children.length) {
    const kids = document.createElement("div");
    kids.className = "fkids";
    for (const child of node.children) {
      kids.appendChild(renderNode(child, state, onSelect));
    }
    el.appendChild(kids);
  }
  return el;
}

export function renderFormulaTree(
  state: PanelState,
  onSelect: (path: string) => void,
): HTMLElement {
  const root = document.createElement("section");
  root.className = "panel";
  root.id = state.panel;
  const title = document.createElement("h3");
  title.textContent = panelTitle(state);
  root.appendChild(title);
  if (!state.entry) {
    return root;
  }
  try {
    root.appendChild(renderNode(state.entry.tree, state, onSelect));
  } catch {
    // fall back to the printed text on a malformed tree
    const pre = document.createElement("pre");
    pre.textContent = state.entry.formula;
    root.appendChild(pre);
  }
  return root;
}

export function selectedNodes(root: HTMLElement): string[] {
  return Array.from(root.querySelectorAll(".fnode.selected")).map(
    (el) => (el as HTMLElement).dataset.path ?? "",
  );
}

export type { EntryJson };
