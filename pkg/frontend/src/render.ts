// Pure view functions: state in, HTML string out. Numbers are displayed to
// 4 decimals, but every displayed figure also carries the service's exact
// value in a data-exact attribute, so nothing is lost to formatting.

import type { ExpertStore, FacilitatorStore } from "./store.js";

const escapeHtml = (text: string): string =>
  text.replace(/[&<>"']/g, (c) => ({
    "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&#39;",
  }[c] as string));

export const fmt = (value: number): string => value.toFixed(4);

const exactSpan = (value: number, cls = ""): string =>
  `<span class="${cls}" data-exact="${String(value)}">${fmt(value)}</span>`;

export function renderExpertView(store: ExpertStore): string {
  const doc = store.doc;
  if (!doc) return `<p class="muted">loading session…</p>`;
  const names = doc.alternatives.map(escapeHtml);
  const parts: string[] = [];

  parts.push(`<h2>Expert ${escapeHtml(store.expertId)}</h2>`);
  if (store.message) {
    const cls = store.submitState === "conflict" ? "banner conflict" : "banner";
    parts.push(`<div class="${cls}">${escapeHtml(store.message)}</div>`);
  }

  const request = store.openRequest;
  if (request) {
    parts.push(`
      <section class="revision" data-request-id="${request.request_id}">
        <h3>Revision request (round ${request.round})</h3>
        <p>Your comparison of <b>${names[request.i]}</b> vs
           <b>${names[request.j]}</b> stands at
           ${exactSpan(request.current_value, "current")}; the group's value is
           ${exactSpan(request.suggested_value, "suggested")}.</p>
        <button data-action="revision-accept">accept ${fmt(request.suggested_value)}</button>
        <input type="number" step="any" min="0" data-field="revision-value"
               placeholder="own value" />
        <button data-action="revision-value">send own value</button>
        <button data-action="revision-decline">decline</button>
      </section>`);
  }

  const pending = store.pendingPairs();
  parts.push(`<h3>Comparisons to provide (${pending.length} open)</h3>`);
  if (pending.length === 0) {
    parts.push(`<p class="muted">all pairs submitted</p>`);
  }
  for (const { i, j } of pending) {
    const draft = store.draftFor(i, j);
    const scaleOptions = store.scaleChoices().map((g) =>
      `<option value="${g}" ${draft.scaleGrades === g ? "selected" : ""}>${g}-grade</option>`
    ).join("");
    const gradeMax = draft.scaleGrades ?? 9;
    parts.push(`
      <div class="pair" data-pair="${i}:${j}">
        <span class="pair-label">${names[i]} vs ${names[j]}</span>
        <select data-field="direction">
          <option value=">" ${draft.direction === ">" ? "selected" : ""}>${names[i]} dominates</option>
          <option value="<" ${draft.direction === "<" ? "selected" : ""}>${names[j]} dominates</option>
        </select>
        <select data-field="scale">
          <option value="">scale…</option>${scaleOptions}
        </select>
        <input type="number" data-field="grade" min="1" max="${gradeMax}" step="1"
               value="${draft.grade ?? ""}" placeholder="grade" />
        <button data-action="submit" ${store.canSubmit(i, j) ? "" : "disabled"}>submit</button>
      </div>`);
  }
  parts.push(`<p class="muted">session ${doc.id}, version ${store.serviceVersion},
              state ${escapeHtml(doc.status)}</p>`);
  return parts.join("\n");
}

export function renderFacilitatorView(store: FacilitatorStore): string {
  const doc = store.doc;
  const agreement = store.agreement;
  if (!doc || !agreement) return `<p class="muted">loading session…</p>`;
  const names = doc.alternatives.map(escapeHtml);
  const parts: string[] = [];

  parts.push(`<h2>Facilitator dashboard</h2>`);
  if (store.message) parts.push(`<div class="banner">${escapeHtml(store.message)}</div>`);
  parts.push(`
    <p>status <b data-status>${escapeHtml(doc.status)}</b>,
       round <b data-round>${doc.round}</b> of ${doc.config.cap}</p>
    <button data-action="evaluate" ${store.busy ? "disabled" : ""}>
      ${store.busy ? "evaluating…" : "run evaluation"}</button>`);

  const completeness = agreement.completeness;
  parts.push(`<section><h3>Completeness</h3>`);
  if (completeness.union_connected) {
    parts.push(`<p class="ok">all alternatives connected by the group's comparisons</p>`);
  } else {
    const suggestions = completeness.suggested_edges
      .map(([i, j]) => `${names[i]} – ${names[j]}`).join(", ");
    parts.push(`<p class="low">disconnected groups:
      ${completeness.components.map((c) => `{${c.map((v) => names[v]).join(", ")}}`).join(" ")}
      — ask any expert to compare: ${suggestions}</p>`);
  }
  const treeless = Object.entries(completeness.connected)
    .filter(([, ok]) => !ok).map(([expert]) => escapeHtml(expert));
  if (treeless.length > 0) {
    parts.push(`<p class="muted">experts without a complete view of their own:
      ${treeless.join(", ")}</p>`);
  }
  parts.push(`</section>`);

  if (agreement.K && agreement.w) {
    const threshold = agreement.threshold ?? 0.7;
    parts.push(`<section><h3>Agreement per alternative (threshold ${threshold})</h3>`);
    agreement.K.forEach((k, index) => {
      const width = Math.round(k * 100);
      const cls = k > threshold ? "gauge ok" : "gauge low";
      parts.push(`
        <div class="${cls}" data-coordinate="${index}">
          <span class="gauge-label">${names[index]}</span>
          <span class="gauge-bar"><span style="width:${width}%"></span></span>
          ${exactSpan(k, "gauge-value")}
        </div>`);
    });
    parts.push(`</section><section><h3>Group priorities</h3><ol class="weights">`);
    const order = agreement.w
      .map((value, index) => ({ value, index }))
      .sort((a, b) => b.value - a.value);
    for (const { value, index } of order) {
      parts.push(`<li data-coordinate="${index}">${names[index]}:
        ${exactSpan(value, "weight")}</li>`);
    }
    parts.push(`</ol>
      <p class="muted">${agreement.tree_count} spanning trees,
      ${agreement.replica_count} rated replicas</p></section>`);
  }

  if (agreement.spectrums) {
    parts.push(`<section><h3>Priority spectrums</h3>`);
    for (const spectrum of agreement.spectrums) {
      const peak = Math.max(...spectrum.rows.map(([, mass]) => mass));
      const bars = spectrum.rows.map(([grade, mass]) => {
        const height = Math.max(4, Math.round((mass / peak) * 48));
        return `<span class="bar" data-grade="${grade}" data-exact="${String(mass)}"
                 style="height:${height}px" title="grade ${grade}: ${mass}"></span>`;
      }).join("");
      parts.push(`
        <div class="spectrum" data-coordinate="${spectrum.coordinate}">
          <span class="spectrum-label">${names[spectrum.coordinate]}</span>
          <div class="spectrum-bars">${bars}</div>
        </div>`);
    }
    parts.push(`</section>`);
  }

  const trace = store.trace();
  parts.push(`<section><h3>Revision trace (${trace.length})</h3><ul class="trace">`);
  for (const entry of trace) {
    parts.push(`<li>round ${entry.round}: ${escapeHtml(entry.expert)} on
      ${names[entry.i]} vs ${names[entry.j]} —
      ${entry.action ? escapeHtml(entry.action) : "open"}</li>`);
  }
  parts.push(`</ul></section>`);
  return parts.join("\n");
}
