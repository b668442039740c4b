import { describe, expect, it } from "vitest";

import {
  blockReason, canSubmit, completedScores, draftComplete, emptyDraft,
  isTotalOrder, markScored, moveEntry, needsJustification, nextPendingTask,
  setJustification, setScore,
} from "../src/state.js";
import type { Session } from "../src/types.js";

function fullDraft(values: [number, number, number, number, number], justification = "") {
  let draft = emptyDraft();
  (["C1", "C2", "C3", "C4", "C5"] as const).forEach((c, i) => {
    draft = setScore(draft, c, values[i]!);
  });
  return setJustification(draft, justification);
}

describe("score draft gating", () => {
  it("submit stays disabled until all five criteria are selected", () => {
    let draft = emptyDraft();
    expect(canSubmit(draft)).toBe(false);
    draft = setScore(draft, "C1", 4);
    draft = setScore(draft, "C2", 4);
    draft = setScore(draft, "C3", 4);
    draft = setScore(draft, "C4", 4);
    expect(draftComplete(draft)).toBe(false);
    expect(canSubmit(draft)).toBe(false);
    expect(blockReason(draft)).toContain("C5");
    draft = setScore(draft, "C5", 5);
    expect(canSubmit(draft)).toBe(true);
    expect(blockReason(draft)).toBeNull();
  });

  it("a draft with any score <= 3 and empty justification cannot be submitted", () => {
    const draft = fullDraft([3, 4, 4, 4, 5]);
    expect(needsJustification(draft)).toBe(true);
    expect(canSubmit(draft)).toBe(false);
    expect(blockReason(draft)).toMatch(/justification/i);
  });

  it("whitespace-only justification does not unlock a low-score draft", () => {
    const draft = fullDraft([2, 4, 4, 4, 5], "   \n ");
    expect(canSubmit(draft)).toBe(false);
  });

  it("a low-score draft with a justification submits", () => {
    const draft = fullDraft([3, 4, 4, 4, 5], "misses the billing entities");
    expect(canSubmit(draft)).toBe(true);
  });

  it("(4,4,4,4,5) submits without justification", () => {
    const draft = fullDraft([4, 4, 4, 4, 5]);
    expect(needsJustification(draft)).toBe(false);
    expect(canSubmit(draft)).toBe(true);
    expect(completedScores(draft)).toEqual({ C1: 4, C2: 4, C3: 4, C4: 4, C5: 5 });
  });

  it("rejects out-of-range values", () => {
    expect(() => setScore(emptyDraft(), "C1", 6)).toThrow(RangeError);
    expect(() => setScore(emptyDraft(), "C1", 0)).toThrow(RangeError);
  });
});

const session: Session = {
  id: "s1", evaluator_id: "A1", mode: "formal", created_at: "",
  task_ids: ["t1", "t2", "t3"],
  tasks: [
    { id: "t1", dataset_id: "d1", status: "scored" },
    { id: "t2", dataset_id: "d2", status: "pending" },
    { id: "t3", dataset_id: "d3", status: "pending" },
  ],
};

describe("task advancement", () => {
  it("finds the next pending task after the current one", () => {
    expect(nextPendingTask(session, "t2")).toBe("t3");
  });

  it("wraps around to earlier pending tasks", () => {
    const s = markScored(session, "t3");
    expect(nextPendingTask(s, "t3")).toBe("t2");
  });

  it("returns null when everything is scored", () => {
    const s = markScored(markScored(session, "t2"), "t3");
    expect(nextPendingTask(s, "t2")).toBeNull();
  });

  it("markScored is non-destructive", () => {
    const s = markScored(session, "t2");
    expect(session.tasks[1]!.status).toBe("pending");
    expect(s.tasks[1]!.status).toBe("scored");
  });
});

describe("tie-break ordering", () => {
  it("accepts exactly a permutation of the tied set", () => {
    expect(isTotalOrder(["gpt", "claude"], ["claude", "gpt"])).toBe(true);
  });

  it("rejects partial orders client-side", () => {
    expect(isTotalOrder(["gpt"], ["claude", "gpt"])).toBe(false);
    expect(isTotalOrder(["gpt", "gpt"], ["claude", "gpt"])).toBe(false);
    expect(isTotalOrder(["gpt", "gemini"], ["claude", "gpt"])).toBe(false);
    expect(isTotalOrder(["gpt", "claude", "gemini"], ["claude", "gpt"])).toBe(false);
  });

  it("moveEntry swaps neighbours and clamps at the edges", () => {
    expect(moveEntry(["a", "b", "c"], 1, -1)).toEqual(["b", "a", "c"]);
    expect(moveEntry(["a", "b", "c"], 0, -1)).toEqual(["a", "b", "c"]);
    expect(moveEntry(["a", "b", "c"], 2, 1)).toEqual(["a", "b", "c"]);
  });
});
