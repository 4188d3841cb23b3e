// DOM layer: renders the session state and forwards user actions.

import type { SessionController, SessionState } from "./session.js";
import type { RecipeCard } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function recipeCardView(card: RecipeCard, label: string): HTMLElement {
  const root = el("section", "recipe-card");
  root.append(el("div", "card-label", label));
  root.append(el("h2", "card-title", card.title));

  const ingredientsHeading = el("h3", undefined, "Ingredients");
  const ingredientList = el("ul", "ingredient-list");
  for (const ingredient of card.ingredients) {
    const item = el("li", "ingredient");
    ingredient.path.forEach((component, index) => {
      if (index > 0) item.append(el("span", "path-sep", "›"));
      item.append(el("span", `path-level path-level-${Math.min(index, 3)}`, component));
    });
    ingredientList.append(item);
  }

  const instructionsHeading = el("h3", undefined, "Instructions");
  const steps = el("ol", "instruction-steps");
  for (const step of card.instructions) {
    steps.append(el("li", "step", step));
  }

  const scroller = el("div", "card-body");
  scroller.append(ingredientsHeading, ingredientList, instructionsHeading, steps);
  root.append(scroller);
  return root;
}

export function render(root: HTMLElement, state: SessionState, controller: SessionController): void {
  root.textContent = "";

  if (state.kind === "loading") {
    root.append(el("div", "status", "Loading the next pair…"));
    return;
  }

  if (state.kind === "load-error") {
    const banner = el("div", "banner error");
    banner.append(el("span", undefined, `Could not reach the server: ${state.message}`));
    const retry = el("button", "retry", "Retry");
    retry.addEventListener("click", () => void controller.retryLoad());
    banner.append(retry);
    root.append(banner);
    return;
  }

  if (state.kind === "done") {
    const panel = el("div", "completion");
    panel.append(el("h2", undefined, "All pairs reviewed"));
    panel.append(
      el("p", undefined, `You judged ${state.judged} of ${state.total} assigned pairs.`),
    );
    if (state.agreement) {
      const a = state.agreement;
      panel.append(
        el(
          "p",
          "agreement",
          `Expert agreement so far: ${a.agreed_count} of ${a.total_pairs_judged_by_all} ` +
            `co-judged pairs (${a.agreement_pct.toFixed(1)}%).`,
        ),
      );
    } else {
      panel.append(el("p", "agreement", "Agreement appears once a second expert finishes."));
    }
    root.append(panel);
    return;
  }

  const task = state.task;
  const header = el("div", "progress");
  header.append(
    el(
      "span",
      undefined,
      `Pair ${task.position} of ${task.total} · ${task.judged} judged`,
    ),
  );
  if (task.fused !== undefined) {
    header.append(el("span", "fused", `fused score ${task.fused.toFixed(4)}`));
  }
  root.append(header);

  const pairRow = el("div", "pair-row");
  pairRow.append(recipeCardView(task.main, "Main recipe"));
  pairRow.append(recipeCardView(task.secondary, "Candidate"));
  root.append(pairRow);

  const controls = el("div", "controls");
  const similar = el("button", "verdict similar", "Similar (s)");
  const notSimilar = el("button", "verdict not-similar", "Not similar (n)");
  const enabled = controller.canSubmit();
  similar.disabled = !enabled;
  notSimilar.disabled = !enabled;
  similar.addEventListener("click", () => void controller.submit("similar"));
  notSimilar.addEventListener("click", () => void controller.submit("not_similar"));
  controls.append(similar, notSimilar);
  if (state.submitting) {
    controls.append(el("span", "status", "Saving…"));
  }
  root.append(controls);
}

export function bindKeyboard(controller: SessionController): void {
  document.addEventListener("keydown", (event) => {
    if (event.target instanceof HTMLInputElement) return;
    if (event.key === "s") void controller.submit("similar");
    if (event.key === "n") void controller.submit("not_similar");
  });
}

export function mountToasts(root: HTMLElement): (message: string) => void {
  const area = el("div", "toast-area");
  root.append(area);
  return (message: string) => {
    const toast = el("div", "toast", message);
    area.append(toast);
    setTimeout(() => toast.remove(), 6000);
  };
}
