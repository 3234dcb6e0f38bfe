// Store behavior against a scripted fetch: submit validation, optimistic
// updates, conflict recovery, revision answers.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { SessionApi } from "../src/api.js";
import { ExpertStore } from "../src/store.js";
import type { SessionDoc } from "../src/types.js";

const baseDoc = (): SessionDoc => ({
  version: 1,
  id: "s1",
  token: "t",
  alternatives: ["a", "b", "c", "d"],
  experts: [
    { id: "e1", competence: 1 / 3, name: "" },
    { id: "e2", competence: 1 / 3, name: "" },
    { id: "e3", competence: 1 / 3, name: "" },
  ],
  config: {
    epsilon: 0.01, threshold: 0.7, cap: 50, mean: "geometric",
    scale_grades: [2, 3, 5, 7, 9],
  },
  judgments: [],
  results: null,
  status: "collecting",
  round: 0,
  open_request: null,
  events: [],
});

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ExpertStore", () => {
  let fetchMock: ReturnType<typeof vi.fn>;

  beforeEach(() => {
    fetchMock = vi.fn();
    vi.stubGlobal("fetch", fetchMock);
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  function makeStore(expert = "e1"): ExpertStore {
    return new ExpertStore(new SessionApi("http://test", "s1", "t"), expert);
  }

  it("lists all unordered pairs as pending before any submission", async () => {
    fetchMock
      .mockResolvedValueOnce(jsonResponse(baseDoc()))
      .mockResolvedValueOnce(jsonResponse({ request: null, version: 1, status: "collecting" }));
    const store = makeStore();
    await store.load();
    expect(store.pendingPairs()).toHaveLength(6);
  });

  it("blocks out-of-range grades client-side", async () => {
    fetchMock
      .mockResolvedValueOnce(jsonResponse(baseDoc()))
      .mockResolvedValueOnce(jsonResponse({ request: null, version: 1, status: "collecting" }));
    const store = makeStore();
    await store.load();
    store.setDraft(0, 1, { scaleGrades: 5, grade: 8, direction: ">" });
    expect(store.canSubmit(0, 1)).toBe(false);
    const submitted = await store.submitComparison(0, 1);
    expect(submitted).toBe(false);
    // no network write happened: only the two load() calls
    expect(fetchMock).toHaveBeenCalledTimes(2);
    store.setDraft(0, 1, { grade: 4 });
    expect(store.canSubmit(0, 1)).toBe(true);
  });

  it("requires a chosen scale before a pair is submittable", async () => {
    fetchMock
      .mockResolvedValueOnce(jsonResponse(baseDoc()))
      .mockResolvedValueOnce(jsonResponse({ request: null, version: 1, status: "collecting" }));
    const store = makeStore();
    await store.load();
    store.setDraft(0, 1, { grade: 3 });
    expect(store.canSubmit(0, 1)).toBe(false);
  });

  it("applies optimistic updates and reconciles the version counter", async () => {
    const doc = baseDoc();
    const updated = {
      ...baseDoc(), version: 2,
      judgments: [{ expert: "e1", i: 0, j: 1, grade: 3, scale_grades: 9 }],
    };
    fetchMock
      .mockResolvedValueOnce(jsonResponse(doc))
      .mockResolvedValueOnce(jsonResponse({ request: null, version: 1, status: "collecting" }))
      .mockResolvedValueOnce(jsonResponse({ stored: 1, version: 2, status: "collecting" }))
      .mockResolvedValueOnce(jsonResponse(updated));
    const store = makeStore();
    await store.load();
    store.setDraft(0, 1, { scaleGrades: 9, grade: 3, direction: ">" });
    const done = await store.submitComparison(0, 1);
    expect(done).toBe(true);
    expect(store.serviceVersion).toBe(2);
    expect(store.pendingPairs()).toHaveLength(5);
    const putCall = fetchMock.mock.calls[2];
    expect(putCall[0]).toContain("/judgments");
    expect(putCall[0]).toContain("version=1");
    expect(JSON.parse(putCall[1].body)).toEqual([
      { expert: "e1", i: 0, j: 1, grade: 3, scale_grades: 9, direction: ">" },
    ]);
  });

  it("recovers from a version conflict with a refresh-and-retry prompt", async () => {
    fetchMock
      .mockResolvedValueOnce(jsonResponse(baseDoc()))
      .mockResolvedValueOnce(jsonResponse({ request: null, version: 1, status: "collecting" }))
      .mockResolvedValueOnce(jsonResponse({ detail: "stale" }, 409))
      .mockResolvedValueOnce(jsonResponse({ ...baseDoc(), version: 5 }));
    const store = makeStore();
    await store.load();
    store.setDraft(0, 1, { scaleGrades: 9, grade: 3, direction: ">" });
    const done = await store.submitComparison(0, 1);
    expect(done).toBe(false);
    expect(store.submitState).toBe("conflict");
    expect(store.message).toContain("retry");
    expect(store.serviceVersion).toBe(5);
    // the optimistic mark was rolled back
    expect(store.pendingPairs()).toHaveLength(6);
  });

  it("surfaces revision requests only to the addressed expert", async () => {
    const request = {
      request_id: "r1", expert: "e2", i: 0, j: 1,
      current_value: 9, suggested_value: 2.2, coordinate: 0,
      round: 1, state_version: 3,
    };
    fetchMock
      .mockResolvedValueOnce(jsonResponse(baseDoc()))
      .mockResolvedValueOnce(jsonResponse({ request, version: 3, status: "awaiting-revision" }));
    const bystander = makeStore("e1");
    await bystander.load();
    expect(bystander.openRequest).toBeNull();

    fetchMock
      .mockResolvedValueOnce(jsonResponse(baseDoc()))
      .mockResolvedValueOnce(jsonResponse({ request, version: 3, status: "awaiting-revision" }));
    const addressee = makeStore("e2");
    await addressee.load();
    expect(addressee.openRequest?.request_id).toBe("r1");
  });

  it("treats an already-resolved revision as an informational notice", async () => {
    const request = {
      request_id: "r1", expert: "e1", i: 0, j: 1,
      current_value: 9, suggested_value: 2.2, coordinate: 0,
      round: 1, state_version: 3,
    };
    fetchMock
      .mockResolvedValueOnce(jsonResponse(baseDoc()))
      .mockResolvedValueOnce(jsonResponse({ request, version: 3, status: "awaiting-revision" }))
      .mockResolvedValueOnce(jsonResponse({ detail: "not open" }, 409))
      .mockResolvedValueOnce(jsonResponse({ request: null, version: 4, status: "converged" }));
    const store = makeStore("e1");
    await store.load();
    expect(store.openRequest).not.toBeNull();
    const answered = await store.answerRevision("accept");
    expect(answered).toBe(false);
    expect(store.message).toContain("already resolved");
    expect(store.openRequest).toBeNull();
  });
});
