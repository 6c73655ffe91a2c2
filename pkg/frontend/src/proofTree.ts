/** Collapsible proof-tree view over the renderer's linearized text.
 * Reuse markers (NNN**) link back to the first occurrence of the entry. */

export interface ProofNode {
  nr: number;
  tag: string;
  text: string;
  column: number;
  reuse: boolean;
  children: ProofNode[];
}

const NODE_RE = /^(\d+)(\*\*|[A-Za-z][A-Za-z0-9]*)(?:\s\s+|\s*$)/;

/** Parse the linearized layout: a node's parents sit two columns right of
 * it, directly above; distant parents are joined by vertical bars. */
export function parseProofTree(text: string): ProofNode {
  interface Raw {
    nr: number;
    tag: string;
    column: number;
    text: string;
    reuse: boolean;
  }
  const raws: Raw[] = [];
  let current: Raw | null = null;
  for (const line of text.split("\n")) {
    const stripped = line.replace(/^[\s|]*/, "");
    if (!stripped.trim()) continue;
    const m = NODE_RE.exec(stripped);
    if (m) {
      current = {
        nr: parseInt(m[1], 10),
        tag: m[2],
        column: line.length - stripped.length,
        text: stripped.slice(m[0].length).trim(),
        reuse: m[2] === "**",
      };
      raws.push(current);
    } else if (current) {
      current.text = (current.text + " " + stripped.trim()).trim();
    }
  }
  const pending = new Map<number, ProofNode[]>();
  let root: ProofNode | null = null;
  for (const raw of raws) {
    const parents = pending.get(raw.column + 2) ?? [];
    pending.delete(raw.column + 2);
    const node: ProofNode = {
      nr: raw.nr,
      tag: raw.tag,
      text: raw.text,
      column: raw.column,
      reuse: raw.reuse,
      children: parents,
    };
    const siblings = pending.get(raw.column) ?? [];
    siblings.push(node);
    pending.set(raw.column, siblings);
    root = node;
  }
  if (!root) throw new Error("empty proof tree");
  return root;
}

export function countNodes(node: ProofNode): number {
  return 1 + node.children.reduce((acc, child) => acc + countNodes(child), 0);
}

export function renderProofTree(root: ProofNode): HTMLElement {
  const seen = new Set<number>();

  function render(node: ProofNode): HTMLElement {
    if (node.reuse) {
      const a = document.createElement("a");
      a.className = "preuse";
      a.textContent = `${node.nr}**`;
      a.href = `#pnode-${node.nr}`;
      a.addEventListener("click", () => {
        const target = document.getElementById(`pnode-${node.nr}`);
        target?.scrollIntoView();
      });
      return a;
    }
    const details = document.createElement("details");
    details.open = true;
    details.className = "pnode";
    if (!seen.has(node.nr)) {
      details.id = `pnode-${node.nr}`;
      seen.add(node.nr);
    }
    const summary = document.createElement("summary");
    summary.textContent = `${node.nr}${node.tag}  ${node.text}`;
    details.appendChild(summary);
    for (const child of node.children) {
      details.appendChild(render(child));
    }
    return details;
  }

  const el = document.createElement("div");
  el.className = "prooftree";
  el.appendChild(render(root));
  return el;
}
