/** Typed client for the workspace session API.
 *
 * Every response carries the system's revision; the client remembers the
 * highest one acknowledged and refuses to hand out older snapshots, so the
 * view can never move backwards.  Mutations echo the revision; a 409 means
 * someone else moved first and surfaces as ConflictError for the caller to
 * refresh and re-prompt.
 */
import type { DecisionBody, ForestDoc, GraphDoc, SessionDoc, Snapshot } from "./model.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ConflictError extends ApiError {
  constructor(message: string) {
    super(409, message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class WorkspaceClient {
  private lastRevision = new Map<string, number>();

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  acknowledged(system: string): number {
    return this.lastRevision.get(system) ?? -1;
  }

  private note(system: string, revision: number): void {
    const seen = this.acknowledged(system);
    if (revision > seen) this.lastRevision.set(system, revision);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (response.status === 409) {
      throw new ConflictError(await response.text());
    }
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async graph(system: string): Promise<{ graph: GraphDoc; revision: number }> {
    const out = await this.request<{ graph: GraphDoc; revision: number }>(
      `/systems/${system}/graph`);
    this.note(system, out.revision);
    return out;
  }

  async forest(system: string): Promise<{ forest: ForestDoc; revision: number }> {
    const out = await this.request<{ forest: ForestDoc; revision: number }>(
      `/systems/${system}/forest`);
    this.note(system, out.revision);
    return out;
  }

  async session(system: string): Promise<SessionDoc | null> {
    try {
      const out = await this.request<SessionDoc>(`/systems/${system}/recovery`);
      this.note(system, out.revision);
      return out;
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
  }

  async candidates(system: string): Promise<{
    state: string; candidates: SessionDoc["candidates"];
    parse_candidates: number[]; revision: number;
  }> {
    const out = await this.request<{
      state: string; candidates: SessionDoc["candidates"];
      parse_candidates: number[]; revision: number;
    }>(`/systems/${system}/recovery/candidates`);
    this.note(system, out.revision);
    return out;
  }

  async startRecovery(system: string, invariant?: string): Promise<SessionDoc> {
    const body: { revision: number; invariant?: string } = {
      revision: Math.max(this.acknowledged(system), 0),
    };
    if (invariant !== undefined) body.invariant = invariant;
    const out = await this.post<SessionDoc>(`/systems/${system}/recovery/start`, body);
    this.note(system, out.revision);
    return out;
  }

  async decide(system: string, decision: Omit<DecisionBody, "revision">): Promise<SessionDoc> {
    const body: DecisionBody = { revision: Math.max(this.acknowledged(system), 0), ...decision };
    const out = await this.post<SessionDoc>(`/systems/${system}/recovery/decision`, body);
    this.note(system, out.revision);
    return out;
  }

  /** One coherent view: re-reads until graph, forest and session agree on a
   * revision at least as new as everything acknowledged so far. */
  async snapshot(system: string): Promise<Snapshot> {
    for (let attempt = 0; attempt < 5; attempt++) {
      const g = await this.graph(system);
      const f = await this.forest(system);
      const s = await this.session(system);
      const revisions = [g.revision, f.revision, ...(s ? [s.revision] : [])];
      const same = revisions.every((r) => r === g.revision);
      if (same && g.revision >= this.acknowledged(system)) {
        return { system, revision: g.revision, graph: g.graph, forest: f.forest, session: s };
      }
    }
    throw new ApiError(500, "could not obtain a coherent snapshot");
  }
}
