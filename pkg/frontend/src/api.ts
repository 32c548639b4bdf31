/** Thin typed client for the session service. Every UI state change goes
 * through one of these calls; there is no other backend. */

import type { AdoptOptions, OverlayMode, ResultDoc, ServiceError, Status } from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public error: ServiceError,
  ) {
    super(`${error.code}: ${error.message}`);
  }

  get isStale(): boolean {
    return this.status === 409;
  }
}

export interface SessionSnapshot {
  result: ResultDoc;
  statuses: Record<string, { status: Status; note: string }>;
  history: { step: number; branch_id: string }[];
}

export interface ExportDocument {
  version: number;
  root_text: string;
  history: { branch_id: string; prior_root_text: string }[];
  statuses: Record<string, { status: Status; note: string }>;
}

async function call<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(`${base}${path}`, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const text = await response.text();
  const body = text ? JSON.parse(text) : {};
  if (!response.ok) {
    const error: ServiceError = body.error ?? { code: "unknown", message: text };
    throw new ApiError(response.status, error);
  }
  return body as T;
}

export class Client {
  constructor(public base: string) {}

  async createSession(dagText: string): Promise<{ session_id: string; result: ResultDoc }> {
    return call(this.base, "/sessions", {
      method: "POST",
      body: JSON.stringify({ dag_text: dagText }),
    });
  }

  async getSession(id: string): Promise<SessionSnapshot> {
    return call(this.base, `/sessions/${id}`);
  }

  async adopt(
    id: string,
    branchId: string,
    generation: number,
    options?: AdoptOptions,
  ): Promise<{ result: ResultDoc }> {
    return call(this.base, `/sessions/${id}/adopt`, {
      method: "POST",
      body: JSON.stringify({ branch_id: branchId, generation, options: options ?? {} }),
    });
  }

  async undo(id: string): Promise<{ result: ResultDoc }> {
    return call(this.base, `/sessions/${id}/undo`, { method: "POST" });
  }

  async setStatus(
    id: string,
    branchId: string,
    status: Status,
    note: string,
  ): Promise<{ item: { id: string; status: Status; note: string } }> {
    return call(this.base, `/sessions/${id}/checklist/${branchId}`, {
      method: "PUT",
      body: JSON.stringify({ status, note }),
    });
  }

  async overlayDot(id: string, mode: OverlayMode): Promise<string> {
    const response = await fetch(`${this.base}/sessions/${id}/overlay.dot?mode=${mode}`);
    if (!response.ok) throw new ApiError(response.status, (await response.json()).error);
    return response.text();
  }

  async exportSession(id: string): Promise<ExportDocument> {
    return call(this.base, `/sessions/${id}/export`);
  }

  async importSession(doc: ExportDocument): Promise<{ session_id: string; result: ResultDoc }> {
    return call(this.base, "/sessions/import", {
      method: "POST",
      body: JSON.stringify(doc),
    });
  }
}
