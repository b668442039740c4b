/** End-to-end acceptance flows against the real evaluation service.
 *
 * Spawns the Python backend over a fixture run (human cells left open),
 * then drives the documented API exactly as the browser code does:
 * score submission and retrieval, low-score justification enforcement,
 * and tie-break resolution updating the rank table.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiRequestError, WorkbenchApi } from "../src/api.js";
import { canSubmit, emptyDraft, setJustification, setScore } from "../src/state.js";
import type { Criterion } from "../src/types.js";

const PYTHON = process.env.MODELBENCH_PYTHON ?? "python3";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("no port assigned"));
      }
    });
  });
}

function seedTiebreak(runDir: string): void {
  // replace one derived rank table with a 2-way tie and register the task
  const ranksPath = join(runDir, "ranks.json");
  const ranks = JSON.parse(readFileSync(ranksPath, "utf-8"));
  ranks["g14-datahub"]["grok"] = {
    dataset_id: "g14-datahub",
    judge_id: "grok",
    ranks: { gpt: 1, claude: 1, gemini: 3, llama: 4 },
    provenance: "derived",
    win_counts: { gpt: 2, claude: 2, gemini: 1, llama: 0 },
  };
  writeFileSync(ranksPath, JSON.stringify(ranks, null, 2));
  const task = {
    id: "g14-datahub:grok:claude-gpt",
    dataset_id: "g14-datahub",
    judge_id: "grok",
    tied: ["claude", "gpt"],
    candidate_texts: { claude: "@startuml\n@enduml", gpt: "@startuml\n@enduml" },
    status: "open",
    resolution: null,
    resolver_id: null,
  };
  writeFileSync(join(runDir, "tiebreaks.json"), JSON.stringify([task], null, 2));
}

let server: ChildProcess | null = null;
let base = "";
let runDir = "";

beforeAll(async () => {
  const dest = mkdtempSync(join(tmpdir(), "workbench-e2e-"));
  const imported = spawnSync(
    PYTHON,
    ["-m", "modelbench.cli", "fixtures", "import-paper",
     "--dest", dest, "--open-human-cells"],
    { encoding: "utf-8" },
  );
  if (imported.status !== 0) {
    throw new Error(`fixture import failed: ${imported.stderr}\n${imported.stdout}`);
  }
  runDir = join(dest, "runs", "paper-fixture");
  seedTiebreak(runDir);

  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  server = spawn(PYTHON, ["-m", "modelbench.cli", "serve",
                          "--run-dir", runDir, "--port", String(port)],
                 { stdio: ["ignore", "pipe", "pipe"] });

  const deadline = Date.now() + 30_000;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${base}/api/v1/health`);
      if (resp.ok) return;
    } catch (err) {
      lastError = err;
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error(`service never became healthy: ${lastError}`);
}, 60_000);

afterAll(() => {
  server?.kill();
});

describe("workbench against the live service", () => {
  it("submitting (4,4,4,4,5) stores a human score retrievable via the API", async () => {
    const api = new WorkbenchApi(base, "token-a1");
    const session = await api.createSession("formal");
    expect(session.tasks.length).toBe(8);
    const taskId = session.tasks[0]!.id;

    let draft = emptyDraft();
    (["C1", "C2", "C3", "C4", "C5"] as Criterion[]).forEach((c, i) => {
      draft = setScore(draft, c, [4, 4, 4, 4, 5][i]!);
    });
    expect(canSubmit(draft)).toBe(true);

    const stored = await api.submitScore(
      taskId, { C1: 4, C2: 4, C3: 4, C4: 4, C5: 5 }, draft.justification);
    expect(stored.rater_kind).toBe("human");
    expect(stored.rater_id).toBe("A1");
    expect(stored.scores).toEqual({ C1: 4, C2: 4, C3: 4, C4: 4, C5: 5 });

    const reloaded = await api.getTask(taskId);
    expect(reloaded.status).toBe("scored");
    expect(reloaded.own_score?.scores).toEqual({ C1: 4, C2: 4, C3: 4, C4: 4, C5: 5 });
  }, 30_000);

  it("a low-score draft without justification is blocked locally and by the service", async () => {
    const api = new WorkbenchApi(base, "token-a2");
    const session = await api.createSession("formal");
    const taskId = session.tasks[0]!.id;

    let draft = emptyDraft();
    (["C1", "C2", "C3", "C4", "C5"] as Criterion[]).forEach((c, i) => {
      draft = setScore(draft, c, [3, 4, 4, 4, 5][i]!);
    });
    expect(canSubmit(draft)).toBe(false); // the UI never enables submit here

    const err = await api
      .submitScore(taskId, { C1: 3, C2: 4, C3: 4, C4: 4, C5: 5 }, "")
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiRequestError);
    expect((err as ApiRequestError).code).toBe("justification-required");

    draft = setJustification(draft, "coverage misses the telemetry entities");
    expect(canSubmit(draft)).toBe(true);
    const stored = await api.submitScore(
      taskId, { C1: 3, C2: 4, C3: 4, C4: 4, C5: 5 }, draft.justification);
    expect(stored.justification).toContain("telemetry");
  }, 30_000);

  it("resolving a 2-way tie yields a valid permutation with human provenance", async () => {
    const api = new WorkbenchApi(base, "token-a1");
    const open = await api.listTiebreaks();
    expect(open.map((t) => t.id)).toContain("g14-datahub:grok:claude-gpt");

    const resolved = await api.resolveTiebreak(
      "g14-datahub:grok:claude-gpt", ["gpt", "claude"]);
    expect(resolved.status).toBe("resolved");
    expect(resolved.resolver_id).toBe("A1");

    const ranks = JSON.parse(readFileSync(join(runDir, "ranks.json"), "utf-8"));
    const table = ranks["g14-datahub"]["grok"];
    expect(table.provenance).toBe("human_tiebreak");
    const values = Object.values(table.ranks as Record<string, number>).sort();
    expect(values).toEqual([1, 2, 3, 4]);
    expect(table.ranks.gpt).toBe(1);
    expect(table.ranks.claude).toBe(2);

    const remaining = await api.listTiebreaks();
    expect(remaining.find((t) => t.id === "g14-datahub:grok:claude-gpt")).toBeUndefined();
  }, 30_000);
});
