// Client-side state for the two roles. Stores hold exactly what the service
// said plus draft inputs; no decision mathematics happens here (disabling the
// UI can never change a result). Both stores poll, so an expert sees a fresh
// revision request within the polling interval of its issuance.

import { ApiError, SessionApi } from "./api.js";
import type {
  AgreementPayload,
  JudgmentSubmission,
  RevisionRequest,
  SessionDoc,
} from "./types.js";

export const POLL_INTERVAL_MS = 1000;

type Listener = () => void;

class Observable {
  private listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  protected notify(): void {
    for (const listener of this.listeners) listener();
  }
}

export interface PairKey {
  i: number;
  j: number;
}

export interface Draft {
  grade: number | null;
  scaleGrades: number | null;
  direction: ">" | "<";
}

export type SubmitState = "idle" | "saving" | "conflict" | "error";

const pairId = (i: number, j: number) => `${i}:${j}`;

export class ExpertStore extends Observable {
  doc: SessionDoc | null = null;
  openRequest: RevisionRequest | null = null;
  serviceVersion = 0;
  submitState: SubmitState = "idle";
  message = "";
  drafts = new Map<string, Draft>();
  private optimistic = new Set<string>();
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(readonly api: SessionApi, readonly expertId: string) {
    super();
  }

  async load(): Promise<void> {
    this.doc = await this.api.getSession();
    this.serviceVersion = this.doc.version;
    await this.pollRevision();
    this.notify();
  }

  allPairs(): PairKey[] {
    if (!this.doc) return [];
    const n = this.doc.alternatives.length;
    const pairs: PairKey[] = [];
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) pairs.push({ i, j });
    }
    return pairs;
  }

  submittedPairs(): Set<string> {
    const done = new Set<string>(this.optimistic);
    if (this.doc) {
      for (const record of this.doc.judgments) {
        if (record.expert === this.expertId) {
          const lo = Math.min(record.i, record.j);
          const hi = Math.max(record.i, record.j);
          done.add(pairId(lo, hi));
        }
      }
    }
    return done;
  }

  pendingPairs(): PairKey[] {
    const done = this.submittedPairs();
    return this.allPairs().filter(({ i, j }) => !done.has(pairId(i, j)));
  }

  draftFor(i: number, j: number): Draft {
    const key = pairId(i, j);
    let draft = this.drafts.get(key);
    if (!draft) {
      draft = { grade: null, scaleGrades: null, direction: ">" };
      this.drafts.set(key, draft);
    }
    return draft;
  }

  setDraft(i: number, j: number, patch: Partial<Draft>): void {
    Object.assign(this.draftFor(i, j), patch);
    this.notify();
  }

  scaleChoices(): number[] {
    return this.doc?.config.scale_grades ?? [2, 3, 5, 7, 9];
  }

  /** A pair is submittable only with a chosen scale and an in-range grade. */
  canSubmit(i: number, j: number): boolean {
    const draft = this.draftFor(i, j);
    return (
      draft.scaleGrades !== null &&
      draft.grade !== null &&
      Number.isFinite(draft.grade) &&
      draft.grade >= 1 &&
      draft.grade <= draft.scaleGrades &&
      Number.isInteger(draft.grade)
    );
  }

  async submitComparison(i: number, j: number): Promise<boolean> {
    if (!this.canSubmit(i, j)) {
      this.message = `comparison ${i}-${j} needs a scale and an in-range grade`;
      this.notify();
      return false;
    }
    const draft = this.draftFor(i, j);
    const row: JudgmentSubmission = {
      expert: this.expertId,
      i,
      j,
      grade: draft.grade as number,
      scale_grades: draft.scaleGrades as number,
      direction: draft.direction,
    };
    // optimistic: the pair leaves the pending list immediately
    this.optimistic.add(pairId(i, j));
    this.submitState = "saving";
    this.notify();
    try {
      const outcome = await this.api.putJudgments([row], this.serviceVersion);
      this.serviceVersion = outcome.version;
      this.submitState = "idle";
      this.message = "";
      await this.refreshDoc();
      return true;
    } catch (error) {
      this.optimistic.delete(pairId(i, j));
      if (error instanceof ApiError && error.isConflict) {
        this.submitState = "conflict";
        this.message = "session changed elsewhere; refreshed, please retry";
        await this.refreshDoc();
      } else {
        this.submitState = "error";
        this.message = error instanceof Error ? error.message : String(error);
        this.notify();
      }
      return false;
    }
  }

  async answerRevision(
    action: "accept" | "value" | "decline",
    value?: number,
    scaleGrades?: number,
  ): Promise<boolean> {
    const request = this.openRequest;
    if (!request) return false;
    try {
      const outcome = await this.api.respondRevision(
        request.request_id, action, this.serviceVersion, value, scaleGrades);
      this.serviceVersion = outcome.version;
      this.openRequest = null;
      this.message = `revision ${action} recorded`;
      await this.refreshDoc();
      return true;
    } catch (error) {
      if (error instanceof ApiError && (error.isConflict || error.status === 422)) {
        this.message = "request was already resolved elsewhere";
        this.openRequest = null;
        await this.pollRevision();
        this.notify();
        return false;
      }
      this.message = error instanceof Error ? error.message : String(error);
      this.notify();
      return false;
    }
  }

  private async refreshDoc(): Promise<void> {
    this.doc = await this.api.getSession();
    this.serviceVersion = this.doc.version;
    // server state now covers everything we submitted optimistically
    this.optimistic.clear();
    this.notify();
  }

  async pollRevision(): Promise<void> {
    const envelope = await this.api.revision();
    this.serviceVersion = envelope.version;
    const request = envelope.request;
    const mine = request !== null && request.expert === this.expertId;
    const changed =
      (this.openRequest?.request_id ?? null) !== (mine ? request!.request_id : null);
    this.openRequest = mine ? request : null;
    if (changed) this.notify();
  }

  startPolling(intervalMs: number = POLL_INTERVAL_MS): void {
    this.stopPolling();
    this.timer = setInterval(() => {
      this.pollRevision().catch(() => undefined);
    }, intervalMs);
  }

  stopPolling(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }
}

export interface TraceEntry {
  round: number;
  expert: string;
  i: number;
  j: number;
  action: string | null;
}

export class FacilitatorStore extends Observable {
  doc: SessionDoc | null = null;
  agreement: AgreementPayload | null = null;
  busy = false;
  message = "";
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(readonly api: SessionApi) {
    super();
  }

  async load(): Promise<void> {
    this.doc = await this.api.getSession();
    this.agreement = await this.api.agreement();
    this.notify();
  }

  async evaluate(): Promise<void> {
    this.busy = true;
    this.notify();
    try {
      await this.api.evaluate();
      await this.load();
      this.message = "";
    } catch (error) {
      this.message = error instanceof Error ? error.message : String(error);
    } finally {
      this.busy = false;
      this.notify();
    }
  }

  /** Revision history derived from the event log; no extra endpoint. */
  trace(): TraceEntry[] {
    if (!this.doc) return [];
    const entries: TraceEntry[] = [];
    const open = new Map<string, TraceEntry>();
    for (const raw of this.doc.events as {
      type: string;
      data: Record<string, unknown>;
    }[]) {
      if (raw.type === "revision-opened") {
        const entry: TraceEntry = {
          round: raw.data.round as number,
          expert: raw.data.expert as string,
          i: raw.data.i as number,
          j: raw.data.j as number,
          action: null,
        };
        open.set(raw.data.request_id as string, entry);
        entries.push(entry);
      } else if (raw.type === "revision-answered") {
        const entry = open.get(raw.data.request_id as string);
        if (entry) entry.action = raw.data.action as string;
      }
    }
    return entries;
  }

  startPolling(intervalMs: number = POLL_INTERVAL_MS): void {
    this.stopPolling();
    this.timer = setInterval(() => {
      this.load().catch(() => undefined);
    }, intervalMs);
  }

  stopPolling(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }
}
