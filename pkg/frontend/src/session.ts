// Review-session state machine, independent of the DOM layer.
//
// Judgments are only ever sent from submit(), which the rendering layer
// calls on an explicit user action. Progress numbers always come from
// server responses (task payloads and submission acks), never from local
// counting, so the counter matches the server after every ack.

import { ApiClient, SubmissionRejected } from "./api.js";
import type { AgreementStats, PairTask, Verdict } from "./types.js";

export type SessionState =
  | { kind: "loading" }
  | { kind: "pair"; task: PairTask; submitting: boolean }
  | { kind: "done"; judged: number; total: number; agreement: AgreementStats | null }
  | { kind: "load-error"; message: string };

export type Listener = (state: SessionState) => void;
export type ToastFn = (message: string) => void;

export class SessionController {
  private state: SessionState = { kind: "loading" };
  private listeners: Listener[] = [];

  constructor(
    private readonly client: ApiClient,
    readonly expert: string,
    private readonly toast: ToastFn = () => {},
  ) {}

  current(): SessionState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
    listener(this.state);
  }

  private transition(state: SessionState): void {
    this.state = state;
    for (const listener of this.listeners) {
      listener(state);
    }
  }

  /** Judged count as last reported by the server. */
  progress(): { judged: number; total: number } | null {
    switch (this.state.kind) {
      case "pair":
        return { judged: this.state.task.judged, total: this.state.task.total };
      case "done":
        return { judged: this.state.judged, total: this.state.total };
      default:
        return null;
    }
  }

  /** Verdict controls are allowed only with a fully loaded, idle pair. */
  canSubmit(): boolean {
    return (
      this.state.kind === "pair" &&
      !this.state.submitting &&
      this.state.task.main.ingredients.length > 0 &&
      this.state.task.secondary.ingredients.length > 0
    );
  }

  async start(): Promise<void> {
    await this.loadNext();
  }

  async retryLoad(): Promise<void> {
    if (this.state.kind === "load-error") {
      await this.loadNext();
    }
  }

  private async loadNext(): Promise<void> {
    this.transition({ kind: "loading" });
    let task;
    try {
      task = await this.client.nextTask(this.expert);
    } catch (error) {
      this.transition({ kind: "load-error", message: describe(error) });
      return;
    }
    if (task.status === "done") {
      const agreement = await this.client.agreement().catch(() => null);
      this.transition({
        kind: "done",
        judged: task.judged,
        total: task.total,
        agreement,
      });
      return;
    }
    this.transition({ kind: "pair", task, submitting: false });
  }

  /** Submit the active pair's verdict; called from a user action only. */
  async submit(verdict: Verdict): Promise<void> {
    if (!this.canSubmit() || this.state.kind !== "pair") {
      return; // double-submit guard: a request is in flight or no pair shown
    }
    const task = this.state.task;
    this.transition({ kind: "pair", task, submitting: true });
    try {
      const ack = await this.client.submitJudgment(
        this.expert,
        task.main.id,
        task.secondary.id,
        verdict,
      );
      if (ack.judged !== task.judged + 1) {
        // server already had this verdict (e.g. replay after a lost ack);
        // its count stays authoritative
        this.toast(`progress resynced at ${ack.judged}/${ack.total}`);
      }
    } catch (error) {
      if (error instanceof SubmissionRejected) {
        this.toast(`submission rejected: ${error.message} [${error.code}]`);
      } else {
        this.toast(`network trouble, verdict not recorded: ${describe(error)}`);
      }
      this.transition({ kind: "pair", task, submitting: false });
      return;
    }
    await this.loadNext();
  }
}

function describe(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}
