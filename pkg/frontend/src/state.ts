/** Panel and selection state: paths are the single selection currency from
 * the UI through the API into the engine. */

import type { EntryJson, TreeNode } from "./api.js";

export type PanelId = "show1" | "show2";

export interface PanelState {
  panel: PanelId;
  entry: EntryJson | null;
  selectedPath: string; // "e" = root
  skolemArgsVisible: boolean;
}

export function emptyPanel(panel: PanelId): PanelState {
  return { panel, entry: null, selectedPath: "e", skolemArgsVisible: false };
}

export function findNode(tree: TreeNode, path: string): TreeNode | null {
  if (path === tree.path) return tree;
  for (const child of tree.children) {
    if (path === child.path || path.startsWith(child.path + ".")) {
      return findNode(child, path);
    }
  }
  return null;
}

/** A selection is valid only against the structural tree the API served. */
export function pathValid(state: PanelState): boolean {
  if (!state.entry) return false;
  return findNode(state.entry.tree, state.selectedPath) !== null;
}

export function panelTitle(state: PanelState): string {
  if (!state.entry) return `${state.panel}: (empty)`;
  const e = state.entry;
  const orig =
    e.orig.op === "user" ? e.name ?? "user" : `${e.orig.op}(${e.orig.parents.join(",")})`;
  return `${state.panel}: nr ${e.nr}, ${e.side}, from ${orig}, selected ${state.selectedPath}`;
}
