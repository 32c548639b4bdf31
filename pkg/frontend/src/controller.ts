/** Session controller: every state change round-trips through the service.
 *
 * Exactly one mutation may be in flight (the pending flag doubles as the
 * double-click guard). A 409 means the result on screen is from a superseded
 * generation: the controller refetches and asks the user to confirm against
 * the fresh result rather than retrying blindly.
 */

import { ApiError, Client } from "./api";
import { Store } from "./state";
import type { AdoptOptions, Status } from "./types";

export class SessionController {
  constructor(
    public client: Client,
    public store: Store,
  ) {}

  async loadDagText(text: string): Promise<void> {
    const { session_id, result } = await this.client.createSession(text);
    this.store.loadSession(session_id, result);
  }

  async refresh(): Promise<void> {
    const state = this.store.get();
    if (!state.sessionId) return;
    const snapshot = await this.client.getSession(state.sessionId);
    this.store.setResult(snapshot.result);
  }

  /** Adopt a branch and re-render from the regenerated result. Returns true
   * when the adoption was applied; false when it was dropped (pending guard)
   * or went stale (state refreshed, caller asks the user again). */
  async adoptAndRefresh(branchId: string, options?: AdoptOptions): Promise<boolean> {
    const state = this.store.get();
    if (!state.sessionId || !state.result) return false;
    if (!this.store.begin()) return false;
    try {
      const { result } = await this.client.adopt(
        state.sessionId,
        branchId,
        state.result.generation,
        options,
      );
      this.store.setResult(result);
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.isStale) {
        const snapshot = await this.client.getSession(state.sessionId);
        this.store.setResult(snapshot.result);
        this.store.markStale(
          "The model changed since this view loaded; review the refreshed branches and confirm again.",
        );
        return false;
      }
      throw error;
    } finally {
      this.store.end();
    }
  }

  async undo(): Promise<boolean> {
    const state = this.store.get();
    if (!state.sessionId) return false;
    if (!this.store.begin()) return false;
    try {
      const { result } = await this.client.undo(state.sessionId);
      this.store.setResult(result);
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.store.setBanner("Nothing to undo.");
        return false;
      }
      throw error;
    } finally {
      this.store.end();
    }
  }

  /** Record a justification; the updated item comes back in the next render
   * because statuses are server state, not client state. */
  async annotate(branchId: string, status: Status, note: string): Promise<boolean> {
    const state = this.store.get();
    if (!state.sessionId) return false;
    if (!this.store.begin()) return false;
    try {
      await this.client.setStatus(state.sessionId, branchId, status, note);
      const snapshot = await this.client.getSession(state.sessionId);
      this.store.setResult(snapshot.result);
      return true;
    } catch (error) {
      if (error instanceof ApiError) {
        this.store.setBanner(`Annotation rejected: ${error.error.message}`);
        return false;
      }
      throw error;
    } finally {
      this.store.end();
    }
  }
}
