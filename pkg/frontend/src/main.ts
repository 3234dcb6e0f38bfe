// Browser bootstrap. The page is addressed as
//   /ui/?session=<id>&token=<token>&role=expert&expert=<id>
//   /ui/?session=<id>&token=<token>&role=facilitator
// and keeps itself fresh by polling the service.

import { SessionApi } from "./api.js";
import { renderExpertView, renderFacilitatorView } from "./render.js";
import { ExpertStore, FacilitatorStore } from "./store.js";

function requireParam(params: URLSearchParams, name: string): string {
  const value = params.get(name);
  if (!value) {
    document.body.innerHTML =
      `<p class="banner">missing required query parameter "${name}"</p>`;
    throw new Error(`missing ${name}`);
  }
  return value;
}

function mountExpert(root: HTMLElement, store: ExpertStore): void {
  const rerender = () => {
    root.innerHTML = renderExpertView(store);
  };
  store.subscribe(rerender);

  root.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    const pairBox = target.closest<HTMLElement>("[data-pair]");
    if (!pairBox) return;
    const [i, j] = (pairBox.dataset.pair as string).split(":").map(Number);
    const field = target.dataset.field;
    if (field === "scale") {
      const raw = (target as HTMLSelectElement).value;
      store.setDraft(i, j, { scaleGrades: raw ? Number(raw) : null });
    } else if (field === "grade") {
      const raw = (target as HTMLInputElement).value;
      store.setDraft(i, j, { grade: raw ? Number(raw) : null });
    } else if (field === "direction") {
      store.setDraft(i, j, {
        direction: (target as HTMLSelectElement).value as ">" | "<",
      });
    }
  });

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const action = target.dataset.action;
    if (!action) return;
    if (action === "submit") {
      const pairBox = target.closest<HTMLElement>("[data-pair]");
      if (!pairBox) return;
      const [i, j] = (pairBox.dataset.pair as string).split(":").map(Number);
      void store.submitComparison(i, j);
    } else if (action === "revision-accept") {
      void store.answerRevision("accept");
    } else if (action === "revision-decline") {
      void store.answerRevision("decline");
    } else if (action === "revision-value") {
      const input = root.querySelector<HTMLInputElement>(
        'input[data-field="revision-value"]');
      const value = input ? Number(input.value) : NaN;
      if (Number.isFinite(value) && value > 0) {
        void store.answerRevision("value", value);
      }
    }
  });

  void store.load().then(() => store.startPolling());
}

function mountFacilitator(root: HTMLElement, store: FacilitatorStore): void {
  const rerender = () => {
    root.innerHTML = renderFacilitatorView(store);
  };
  store.subscribe(rerender);
  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.action === "evaluate") void store.evaluate();
  });
  void store.load().then(() => store.startPolling());
}

const params = new URLSearchParams(window.location.search);
const root = document.getElementById("app") as HTMLElement;
const api = new SessionApi(
  window.location.origin,
  requireParam(params, "session"),
  requireParam(params, "token"),
);
if ((params.get("role") ?? "facilitator") === "expert") {
  mountExpert(root, new ExpertStore(api, requireParam(params, "expert")));
} else {
  mountFacilitator(root, new FacilitatorStore(api));
}
