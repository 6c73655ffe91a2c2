/** The proof navigator: two formula panels, the derived-formula table, a
 * command bar for the proof operations, and the proof-tree view.  Every
 * state change goes through the API. */

import { ApiClient, ApiError, type ApplyRequest, type EntryJson } from "./api.js";
import { renderFormulaTree } from "./formulaTree.js";
import { countNodes, parseProofTree, renderProofTree } from "./proofTree.js";
import { emptyPanel, pathValid, type PanelId, type PanelState } from "./state.js";

export interface OpSpec {
  arity: 1 | 2;
  /** map the panel selections onto the engine's path annotations */
  paths(show1: PanelState, show2: PanelState): Record<string, string[]>;
}

export const OPERATIONS: Record<string, OpSpec> = {
  rs: { arity: 2, paths: (a, b) => ({ h: [a.selectedPath], o: [b.selectedPath] }) },
  rp: { arity: 2, paths: (a, b) => ({ eq: [a.selectedPath], at: [b.selectedPath] }) },
  rm2: { arity: 2, paths: (a, b) => ({ h: [a.selectedPath], o: [b.selectedPath] }) },
  rm1: { arity: 1, paths: (a) => ({ at: [a.selectedPath] }) },
  un: { arity: 1, paths: (a, b) => ({ p: [a.selectedPath, b.selectedPath] }) },
  sp: { arity: 1, paths: (a) => ({ p: [a.selectedPath] }) },
  tf: { arity: 1, paths: (a) => ({ at: [a.selectedPath] }) },
  co: { arity: 1, paths: (a) => ({ at: [a.selectedPath] }) },
};

export class App {
  session: number | null = null;
  entries: EntryJson[] = [];
  show1: PanelState = emptyPanel("show1");
  show2: PanelState = emptyPanel("show2");
  lastError = "";

  constructor(
    public api: ApiClient,
    public root: HTMLElement,
  ) {}

  async loadCorpus(corpus: string): Promise<void> {
    this.session = await this.api.createSession(corpus);
    await this.refresh();
  }

  async refresh(): Promise<void> {
    if (this.session === null) return;
    this.entries = await this.api.listEntries(this.session);
    this.render();
  }

  async focus(panel: PanelId, nr: number): Promise<void> {
    if (this.session === null) return;
    const entry = await this.api.getEntry(this.session, nr);
    const state = panel === "show1" ? this.show1 : this.show2;
    state.entry = entry;
    state.selectedPath = "e";
    this.render();
  }

  select(panel: PanelId, path: string): void {
    const state = panel === "show1" ? this.show1 : this.show2;
    state.selectedPath = path;
    if (!pathValid(state)) {
      state.selectedPath = "e";
    }
    this.render();
  }

  /** Issue a proof operation over the current panel selections; failures
   * surface the engine's precondition diagnostics inline. */
  async issueOperation(op: string, extra: Record<string, string[]> = {}): Promise<EntryJson | null> {
    if (this.session === null) return null;
    const spec = OPERATIONS[op];
    if (!spec) {
      this.lastError = `unknown operation ${op}`;
      this.render();
      return null;
    }
    if (!this.show1.entry || (spec.arity === 2 && !this.show2.entry)) {
      this.lastError = `${op} needs ${spec.arity} selected ${spec.arity === 1 ? "entry" : "entries"}`;
      this.render();
      return null;
    }
    const parents =
      spec.arity === 2
        ? [this.show1.entry.nr, this.show2.entry!.nr]
        : [this.show1.entry.nr];
    const paths = { ...spec.paths(this.show1, this.show2), ...extra };
    const req: ApplyRequest = { op, parents, paths };
    try {
      const entry = await this.api.apply(this.session, req);
      this.lastError = "";
      await this.refresh();
      return entry;
    } catch (err) {
      this.lastError = err instanceof ApiError ? `${op} rejected: ${err.detail}` : String(err);
      this.render();
      return null;
    }
  }

  async undo(): Promise<void> {
    if (this.session === null) return;
    try {
      await this.api.undo(this.session);
      this.lastError = "";
    } catch (err) {
      this.lastError = err instanceof ApiError ? err.detail : String(err);
    }
    await this.refresh();
  }

  async proofTreeView(rootNr: number): Promise<HTMLElement> {
    if (this.session === null) throw new Error("no session");
    const text = await this.api.exportText(this.session, "proof-tree", rootNr);
    const tree = parseProofTree(text);
    const el = renderProofTree(tree);
    el.dataset.nodeCount = String(countNodes(tree));
    return el;
  }

  render(): void {
    this.root.textContent = "";
    const table = document.createElement("table");
    table.id = "tab";
    const head = document.createElement("tr");
    head.innerHTML = "<th>nr</th><th>side</th><th>origin</th><th>formula</th>";
    table.appendChild(head);
    for (const e of this.entries) {
      const row = document.createElement("tr");
      row.dataset.nr = String(e.nr);
      const origin = e.orig.op === "user" ? e.name ?? "user" : `${e.orig.op}(${e.orig.parents.join(",")})`;
      for (const cell of [String(e.nr), e.side, origin, e.formula]) {
        const td = document.createElement("td");
        td.textContent = cell;
        row.appendChild(td);
      }
      row.addEventListener("click", () => void this.focus("show1", e.nr));
      row.addEventListener("dblclick", () => void this.focus("show2", e.nr));
      table.appendChild(row);
    }
    this.root.appendChild(table);
    this.root.appendChild(
      renderFormulaTree(this.show1, (p) => this.select("show1", p)),
    );
    this.root.appendChild(
      renderFormulaTree(this.show2, (p) => this.select("show2", p)),
    );
    const err = document.createElement("div");
    err.id = "error";
    err.textContent = this.lastError;
    this.root.appendChild(err);
  }
}
