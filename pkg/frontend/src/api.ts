/** Thin client for the synthcell JSON API; the UI holds no proof logic. */

export interface TreeNode {
  kind: string;
  label: string;
  path: string; // dotted 1-based child indices, "e" for the root
  children: TreeNode[];
}

export interface OriginJson {
  op: string;
  parents: number[];
  annotations: [string, string][];
}

export interface EntryJson {
  nr: number;
  side: "assertion" | "goal";
  name: string | null;
  formula: string;
  tree: TreeNode;
  output: Record<string, string>;
  orig: OriginJson;
}

export interface ApplyRequest {
  op: string;
  parents: number[];
  paths: Record<string, string[]>;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

async function asJson<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = (await res.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      /* keep the status text */
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class ApiClient {
  constructor(public base: string) {}

  private url(path: string): string {
    return this.base.replace(/\/$/, "") + path;
  }

  async corpora(): Promise<string[]> {
    return asJson(await fetch(this.url("/corpora")));
  }

  async createSession(corpus?: string, axioms?: string): Promise<number> {
    const res = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ corpus: corpus ?? null, axioms: axioms ?? null }),
    });
    const body = await asJson<{ id: number }>(res);
    return body.id;
  }

  async listEntries(sid: number): Promise<EntryJson[]> {
    return asJson(await fetch(this.url(`/sessions/${sid}/entries`)));
  }

  async getEntry(sid: number, nr: number): Promise<EntryJson> {
    return asJson(await fetch(this.url(`/sessions/${sid}/entries/${nr}`)));
  }

  async apply(sid: number, req: ApplyRequest): Promise<EntryJson> {
    const res = await fetch(this.url(`/sessions/${sid}/apply`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    return asJson(res);
  }

  async undo(sid: number): Promise<number> {
    const res = await fetch(this.url(`/sessions/${sid}/undo`), { method: "POST" });
    const body = await asJson<{ removed: number }>(res);
    return body.removed;
  }

  async exportText(
    sid: number,
    format: "proof-term" | "proof-tree",
    root?: number,
  ): Promise<string> {
    const extra = root !== undefined ? `&root=${root}` : "";
    const res = await fetch(this.url(`/sessions/${sid}/export?format=${format}${extra}`));
    const body = await asJson<{ text: string }>(res);
    return body.text;
  }
}
