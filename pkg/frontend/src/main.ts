/** Browser entry point: corpus picker, command bar, undo, proof-tree view. */

import { ApiClient } from "./api.js";
import { App, OPERATIONS } from "./app.js";

async function boot(): Promise<void> {
  const api = new ApiClient(
    (window as unknown as { SYNTHCELL_API?: string }).SYNTHCELL_API ?? "http://127.0.0.1:8750",
  );
  const main = document.getElementById("main");
  if (!main) throw new Error("missing #main");
  const app = new App(api, main);

  const picker = document.getElementById("corpus") as HTMLSelectElement;
  for (const name of await api.corpora()) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    picker.appendChild(opt);
  }
  (document.getElementById("load") as HTMLButtonElement).addEventListener("click", () => {
    void app.loadCorpus(picker.value);
  });

  const cmd = document.getElementById("command") as HTMLInputElement;
  (document.getElementById("run") as HTMLButtonElement).addEventListener("click", () => {
    const words = cmd.value.trim().split(/\s+/);
    const op = words[0];
    const extra: Record<string, string[]> = {};
    for (const w of words.slice(1)) {
      const i = w.indexOf(":");
      if (i > 0) {
        const key = w.slice(0, i);
        (extra[key] ??= []).push(w.slice(i + 1));
      }
    }
    if (op in OPERATIONS) {
      void app.issueOperation(op, extra);
    }
  });
  (document.getElementById("undo") as HTMLButtonElement).addEventListener("click", () => {
    void app.undo();
  });
  (document.getElementById("tree") as HTMLButtonElement).addEventListener("click", () => {
    const last = app.entries[app.entries.length - 1];
    if (!last) return;
    void app.proofTreeView(last.nr).then((el) => {
      const host = document.getElementById("treeview");
      if (host) {
        host.textContent = "";
        host.appendChild(el);
      }
    });
  });
}

void boot();
