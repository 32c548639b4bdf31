/** View state and its transitions.
 *
 * One in-flight mutation at a time: `begin()` refuses while pending, which is
 * the double-click guard. Reads may race mutations; the server's generation
 * counter decides, and a 409 surfaces as `stale` so the view refetches and
 * asks the user again instead of silently reapplying.
 */

import type { Classification, OverlayMode, ResultDoc, Status } from "./types";

export interface ChecklistFilter {
  status: Status | "all";
  classification: Classification | "all";
}

export interface ViewState {
  sessionId: string | null;
  result: ResultDoc | null;
  selectedBranch: string | null;
  mode: OverlayMode;
  filter: ChecklistFilter;
  pending: boolean;
  stale: boolean;
  banner: string | null;
}

export type Listener = (state: ViewState) => void;

export function initialState(): ViewState {
  return {
    sessionId: null,
    result: null,
    selectedBranch: null,
    mode: "collapsed",
    filter: { status: "all", classification: "all" },
    pending: false,
    stale: false,
    banner: null,
  };
}

export class Store {
  private state: ViewState = initialState();
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter(l => l !== listener);
    };
  }

  private commit(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  loadSession(sessionId: string, result: ResultDoc): void {
    this.commit({
      sessionId,
      result,
      selectedBranch: null,
      stale: false,
      banner: null,
    });
  }

  /** Replace the result after a fetch or mutation; drops a selection that no
   * longer exists so the rendered graph always reflects the latest result. */
  setResult(result: ResultDoc): void {
    const ids = new Set([...result.exclusions, ...result.misdirections].map(b => b.id));
    const selectedBranch =
      this.state.selectedBranch && ids.has(this.state.selectedBranch)
        ? this.state.selectedBranch
        : null;
    this.commit({ result, selectedBranch, stale: false });
  }

  select(branchId: string | null): void {
    this.commit({ selectedBranch: branchId });
  }

  toggleMode(): void {
    this.commit({ mode: this.state.mode === "collapsed" ? "expanded" : "collapsed" });
  }

  setFilter(filter: Partial<ChecklistFilter>): void {
    this.commit({ filter: { ...this.state.filter, ...filter } });
  }

  /** Claim the single mutation slot; false means a request is already in
   * flight and the caller must drop the action. */
  begin(): boolean {
    if (this.state.pending) return false;
    this.commit({ pending: true, banner: null });
    return true;
  }

  end(): void {
    this.commit({ pending: false });
  }

  markStale(message: string): void {
    this.commit({ stale: true, banner: message });
  }

  setBanner(message: string | null): void {
    this.commit({ banner: message });
  }
}
