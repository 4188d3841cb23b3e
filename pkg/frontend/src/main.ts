// Bootstrap: pin the expert identity for the session, then run the loop.

import { ApiClient } from "./api.js";
import { bindKeyboard, mountToasts, render } from "./render.js";
import { SessionController } from "./session.js";

const EXPERT_KEY = "recipesim.expert";

function expertForm(root: HTMLElement, onReady: (expert: string) => void): void {
  const panel = document.createElement("div");
  panel.className = "expert-form";
  const heading = document.createElement("h2");
  heading.textContent = "Recipe pair review";
  const input = document.createElement("input");
  input.placeholder = "Your expert id";
  input.autofocus = true;
  const button = document.createElement("button");
  button.textContent = "Start reviewing";
  const submit = () => {
    const expert = input.value.trim();
    if (!expert) return;
    sessionStorage.setItem(EXPERT_KEY, expert);
    onReady(expert);
  };
  button.addEventListener("click", submit);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") submit();
  });
  panel.append(heading, input, button);
  root.textContent = "";
  root.append(panel);
}

function run(root: HTMLElement, toastRoot: HTMLElement, expert: string): void {
  const toast = mountToasts(toastRoot);
  const controller = new SessionController(new ApiClient(""), expert, toast);
  controller.subscribe((state) => render(root, state, controller));
  bindKeyboard(controller);
  void controller.start();
}

function boot(): void {
  const root = document.getElementById("app");
  const toastRoot = document.getElementById("toasts");
  if (!root || !toastRoot) throw new Error("missing #app or #toasts mount points");
  const saved = sessionStorage.getItem(EXPERT_KEY);
  if (saved) {
    run(root, toastRoot, saved);
  } else {
    expertForm(root, (expert) => run(root, toastRoot, expert));
  }
}

boot();
