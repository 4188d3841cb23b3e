// Typed client for the annotation service.
//
// Judgment submission is idempotent server-side, so a request that dies on
// the network (including a response lost after the server persisted the
// write) is retried once; a 4xx rejection is never retried.

import type { AgreementStats, NextTask, SubmitAck, Verdict } from "./types.js";

export class SubmissionRejected extends Error {
  constructor(
    readonly code: string,
    detail: string,
    readonly status: number,
  ) {
    super(detail);
    this.name = "SubmissionRejected";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
    private readonly retryDelayMs: number = 200,
  ) {}

  async nextTask(expert: string): Promise<NextTask> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/tasks/next?expert=${encodeURIComponent(expert)}`,
    );
    return (await this.parse(response)) as NextTask;
  }

  async submitJudgment(
    expert: string,
    mainId: string,
    secondaryId: string,
    verdict: Verdict,
  ): Promise<SubmitAck> {
    const request = () =>
      this.fetchImpl(`${this.baseUrl}/api/judgments`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({
          expert,
          main_id: mainId,
          secondary_id: secondaryId,
          verdict,
        }),
      });
    let response: Response;
    try {
      response = await request();
    } catch {
      // network drop mid-submit: the verdict may or may not have been
      // persisted; resubmitting the identical verdict is safe either way
      await sleep(this.retryDelayMs);
      response = await request();
    }
    return (await this.parse(response)) as SubmitAck;
  }

  async agreement(): Promise<AgreementStats | null> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/stats/agreement`);
    if (response.status === 409) {
      return null; // fewer than two experts so far
    }
    return (await this.parse(response)) as AgreementStats;
  }

  private async parse(response: Response): Promise<unknown> {
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const record = body as { error?: string; detail?: string };
      throw new SubmissionRejected(
        record.error ?? `http_${response.status}`,
        record.detail ?? `request failed with status ${response.status}`,
        response.status,
      );
    }
    return body;
  }
}
