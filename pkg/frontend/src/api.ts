// Thin fetch client for the facilitation service. One class per session,
// carrying the base URL and access token; every method maps 1:1 onto a
// service resource.

import type {
  AgreementPayload,
  JudgmentSubmission,
  RevisionAction,
  RevisionEnvelope,
  SessionDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
  get isConflict(): boolean {
    return this.status === 409;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // keep the status text
  }
  return new ApiError(response.status, detail);
}

export class SessionApi {
  constructor(
    readonly baseUrl: string,
    readonly sessionId: string,
    readonly token: string,
  ) {}

  private url(path: string, extra: Record<string, string | number> = {}): string {
    const params = new URLSearchParams({ token: this.token });
    for (const [key, value] of Object.entries(extra)) params.set(key, String(value));
    const suffix = path ? `/${path}` : "";
    return `${this.baseUrl}/sessions/${this.sessionId}${suffix}?${params}`;
  }

  private async request<T>(
    path: string,
    init?: RequestInit,
    extra: Record<string, string | number> = {},
  ): Promise<T> {
    const response = await fetch(this.url(path, extra), {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  getSession(): Promise<SessionDoc> {
    return this.request<SessionDoc>("");
  }

  putJudgments(rows: JudgmentSubmission[], version?: number):
      Promise<{ stored: number; version: number; status: string }> {
    const extra: Record<string, string | number> =
      version === undefined ? {} : { version };
    return this.request("judgments", {
      method: "PUT",
      body: JSON.stringify(rows),
    }, extra);
  }

  evaluate(): Promise<AgreementPayload & { version: number }> {
    return this.request("evaluate", { method: "POST" });
  }

  agreement(): Promise<AgreementPayload> {
    return this.request("agreement");
  }

  revision(): Promise<RevisionEnvelope> {
    return this.request("revision");
  }

  respondRevision(
    requestId: string,
    action: RevisionAction,
    version: number,
    value?: number,
    scaleGrades?: number,
  ): Promise<{ applied: boolean; status: string; version: number }> {
    return this.request("revision", {
      method: "POST",
      body: JSON.stringify({
        request_id: requestId,
        action,
        value: value ?? null,
        scale_grades: scaleGrades ?? null,
        version,
      }),
    });
  }
}

export async function createSession(
  baseUrl: string,
  alternatives: string[],
  experts: { id: string; name?: string; competence?: number }[],
  config: Record<string, unknown> = {},
): Promise<SessionDoc> {
  const response = await fetch(`${baseUrl}/sessions`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ alternatives, experts, config }),
  });
  if (!response.ok) throw await parseError(response);
  return (await response.json()) as SessionDoc;
}
