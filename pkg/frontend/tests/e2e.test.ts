// End-to-end: two scripted review sessions against the real annotation
// service, with one forced mid-submit network failure (response lost after
// the server persisted the write). Verifies the agreement stats match the
// scripted disagreement plan and that the judgment log has no lost or
// duplicated writes.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, type FetchLike } from "../src/api.js";
import { SessionController } from "../src/session.js";
import type { Verdict } from "../src/types.js";

const repoRoot = fileURLToPath(new URL("../..", import.meta.url));
const port = 20000 + Math.floor(Math.random() * 20000);
const base = `http://127.0.0.1:${port}`;

let server: ChildProcess;
let storePath: string;

async function waitForHealth(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${base}/api/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("annotation service did not come up");
}

beforeAll(async () => {
  const workDir = mkdtempSync(join(tmpdir(), "recipesim-e2e-"));
  storePath = join(workDir, "judgments.jsonl");
  server = spawn(
    "python3",
    [
      "-m", "recipesim.cli", "serve",
      "--corpus", join(repoRoot, "data", "mini_corpus.jsonl"),
      "--table", join(repoRoot, "tests", "data", "golden_scores.csv"),
      "--task-set", join(workDir, "tasks.json"),
      "--n-mains", "10",
      "--k", "2",
      "--seed", "3",
      "--store", storePath,
      "--port", String(port),
    ],
    { cwd: repoRoot, stdio: "ignore" },
  );
  await waitForHealth();
}, 30_000);

afterAll(() => {
  server.kill();
});

/** Both experts derive the same base verdict per pair from its ids. */
function baseVerdict(pairKey: string): Verdict {
  let hash = 0;
  for (const ch of pairKey) hash = (hash * 31 + ch.charCodeAt(0)) >>> 0;
  return hash % 2 === 0 ? "similar" : "not_similar";
}

function flipped(verdict: Verdict): Verdict {
  return verdict === "similar" ? "not_similar" : "similar";
}

async function runScriptedSession(
  expert: string,
  disagreeEvery: number | null,
  fetchImpl?: FetchLike,
): Promise<Map<string, Verdict>> {
  const verdicts = new Map<string, Verdict>();
  const controller = new SessionController(new ApiClient(base, fetchImpl), expert);
  await controller.start();
  let index = 0;
  for (;;) {
    const state = controller.current();
    if (state.kind === "done") break;
    if (state.kind !== "pair") throw new Error(`stuck in state ${state.kind}`);
    const key = `${state.task.main.id}|${state.task.secondary.id}`;
    let verdict = baseVerdict(key);
    if (disagreeEvery !== null && index % disagreeEvery === 0) {
      verdict = flipped(verdict);
    }
    verdicts.set(key, verdict);
    await controller.submit(verdict);
    index += 1;
  }
  return verdicts;
}

describe("annotation flow end to end", () => {
  it(
    "two scripted sessions, one forced mid-submit retry, exact agreement",
    async () => {
      // expert beta loses one response mid-submit; the client's retry must
      // not duplicate the write
      let faultsLeft = 1;
      let faultsFired = 0;
      const faultyFetch: FetchLike = async (input, init) => {
        const response = await fetch(input, init);
        if (faultsLeft > 0 && String(input).includes("/api/judgments")) {
          faultsLeft -= 1;
          faultsFired += 1;
          throw new TypeError("response lost after server processed the write");
        }
        return response;
      };

      const [alpha, beta] = await Promise.all([
        runScriptedSession("alpha", null),
        runScriptedSession("beta", 5, faultyFetch),
      ]);
      expect(faultsFired).toBe(1);
      expect(alpha.size).toBeGreaterThan(0);
      expect(alpha.size).toBe(beta.size);

      // planned agreement: pairs where beta did not flip
      let plannedAgreed = 0;
      for (const [key, verdict] of alpha) {
        if (beta.get(key) === verdict) plannedAgreed += 1;
      }
      expect(plannedAgreed).toBeLessThan(alpha.size); // the plan disagrees somewhere

      const stats = (await new ApiClient(base).agreement())!;
      expect(stats.total_pairs_judged_by_all).toBe(alpha.size);
      expect(stats.agreed_count).toBe(plannedAgreed);
      expect(stats.agreement_pct).toBeCloseTo((100 * plannedAgreed) / alpha.size, 6);

      // the store holds exactly one line per (expert, pair): nothing lost,
      // nothing duplicated by the forced retry
      const lines = readFileSync(storePath, "utf-8").trim().split("\n");
      expect(lines).toHaveLength(2 * alpha.size);
      const effective = new Map<string, Verdict>();
      for (const line of lines) {
        const entry = JSON.parse(line) as {
          expert: string;
          main_id: string;
          secondary_id: string;
          verdict: Verdict;
        };
        const key = `${entry.expert}:${entry.main_id}|${entry.secondary_id}`;
        expect(effective.has(key)).toBe(false); // no duplicate appends
        effective.set(key, entry.verdict);
      }
      for (const [key, verdict] of alpha) {
        expect(effective.get(`alpha:${key}`)).toBe(verdict);
      }
      for (const [key, verdict] of beta) {
        expect(effective.get(`beta:${key}`)).toBe(verdict);
      }

      // the exported ground truth carries exactly the agreed pairs
      const exportText = await (await fetch(`${base}/api/export/ground-truth`)).text();
      expect(exportText.trim().split("\n")).toHaveLength(1 + plannedAgreed);
    },
    60_000,
  );
});
