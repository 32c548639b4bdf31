/** Result document shapes, mirroring the service JSON exactly. */

export type Role = "exposure" | "outcome" | "adjusted" | "instrument" | "plain";
export type PathwayKind = "directed" | "bidirected-latent";
export type Status = "open" | "justified" | "impossible" | "violated";
export type Classification =
  | "unmeasured-confounding"
  | "direct-pathway"
  | "reverse-causation"
  | "collider-conditioning"
  | "mediator-misread"
  | "downstream-conditioning"
  | "other";

export interface NodeDoc {
  name: string;
  role: Role;
  pos?: [number, number];
}

export interface EdgeDoc {
  from: string;
  to: string;
  fixed: boolean;
}

export interface EstimandDoc {
  exposure: string;
  outcome: string;
  adjusted_set: string[];
  effect_type: "total" | "direct";
  iv_mode: boolean;
  instrument: string | null;
}

export interface KnownOmittedDoc {
  name: string;
  pair: [string, string];
  kind: PathwayKind;
}

export interface ReasonDoc {
  kind: "adjustment-set-change" | "frontdoor-count-change" | "iv-validity-change";
  detail: { before: unknown; after: unknown };
}

export interface ExclusionDoc {
  id: string;
  pair: [string, string];
  pathway_kind: PathwayKind;
  reason: ReasonDoc;
  known_members: string[];
}

export interface MisdirectionDoc {
  id: string;
  flips: [string, string][];
  reason: ReasonDoc;
}

export interface ChecklistItemDoc {
  id: string;
  statement: string;
  classification: Classification;
  status: Status;
  note: string;
}

export interface ResultDoc {
  root: {
    nodes: NodeDoc[];
    edges: EdgeDoc[];
    estimand: EstimandDoc;
    known_omitted: KnownOmittedDoc[];
  };
  exclusions: ExclusionDoc[];
  misdirections: MisdirectionDoc[];
  checklist: ChecklistItemDoc[];
  generation: number;
}

export interface AdoptOptions {
  name?: string;
  leave_unadjusted?: boolean;
}

export type OverlayMode = "expanded" | "collapsed";

export interface ServiceError {
  code: string;
  message: string;
  details?: unknown;
}

/** All branch ids of a result, exclusions first (matching the engine order). */
export function branchIds(doc: ResultDoc): string[] {
  return [...doc.exclusions.map(b => b.id), ...doc.misdirections.map(m => m.id)];
}

/** Branches counted the way the checklist reads them: one per exclusion
 * member (known plus the unknown residual) and one per misdirection. */
export function branchCount(doc: ResultDoc): number {
  const members = doc.exclusions.reduce((n, b) => n + b.known_members.length + 1, 0);
  return members + doc.misdirections.length;
}
