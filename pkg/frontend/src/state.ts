/** Pure workbench state: score drafts, submit gating, task advancement,
 * and tie-break ordering checks. The DOM layer calls these and renders. */

import { CRITERIA, type Criterion, type Session } from "./types.js";

export interface Draft {
  scores: Partial<Record<Criterion, number>>;
  justification: string;
}

export function emptyDraft(): Draft {
  return { scores: {}, justification: "" };
}

export function setScore(draft: Draft, criterion: Criterion, value: number): Draft {
  if (!Number.isInteger(value) || value < 1 || value > 5) {
    throw new RangeError(`score must be an integer in 1..5, got ${value}`);
  }
  return { ...draft, scores: { ...draft.scores, [criterion]: value } };
}

export function setJustification(draft: Draft, text: string): Draft {
  return { ...draft, justification: text };
}

export function draftComplete(draft: Draft): boolean {
  return CRITERIA.every((c) => typeof draft.scores[c] === "number");
}

/** A justification becomes mandatory as soon as any criterion is 3 or lower. */
export function needsJustification(draft: Draft): boolean {
  return CRITERIA.some((c) => {
    const v = draft.scores[c];
    return typeof v === "number" && v <= 3;
  });
}

export function canSubmit(draft: Draft): boolean {
  if (!draftComplete(draft)) return false;
  if (needsJustification(draft) && draft.justification.trim() === "") return false;
  return true;
}

/** Human-readable reason the submit button is disabled, or null if enabled. */
export function blockReason(draft: Draft): string | null {
  if (!draftComplete(draft)) {
    const missing = CRITERIA.filter((c) => typeof draft.scores[c] !== "number");
    return `select a score for ${missing.join(", ")}`;
  }
  if (needsJustification(draft) && draft.justification.trim() === "") {
    return "a justification is required when any criterion is scored 3 or lower";
  }
  return null;
}

export function completedScores(draft: Draft): Record<Criterion, number> {
  if (!draftComplete(draft)) {
    throw new Error("draft is incomplete");
  }
  return Object.fromEntries(
    CRITERIA.map((c) => [c, draft.scores[c] as number]),
  ) as Record<Criterion, number>;
}

/** Next pending task after the given one, scanning forward then wrapping. */
export function nextPendingTask(session: Session, afterTaskId?: string): string | null {
  const order = session.tasks.map((t) => t.id);
  const start = afterTaskId ? order.indexOf(afterTaskId) + 1 : 0;
  const rotated = [...order.slice(start), ...order.slice(0, start)];
  for (const id of rotated) {
    const task = session.tasks.find((t) => t.id === id);
    if (task && task.status === "pending" && id !== afterTaskId) return id;
  }
  return null;
}

export function markScored(session: Session, taskId: string): Session {
  return {
    ...session,
    tasks: session.tasks.map((t) =>
      t.id === taskId ? { ...t, status: "scored" } : t,
    ),
  };
}

/** A resolution must be a total order over the tied set: same members,
 * no duplicates, nothing missing, nothing foreign. */
export function isTotalOrder(ordering: string[], tied: string[]): boolean {
  if (ordering.length !== tied.length) return false;
  const seen = new Set(ordering);
  if (seen.size !== ordering.length) return false;
  return tied.every((t) => seen.has(t));
}

/** Move one entry of an ordering up (-1) or down (+1); used by the
 * reorder controls and drag-drop handler. */
export function moveEntry(ordering: string[], index: number, delta: -1 | 1): string[] {
  const target = index + delta;
  if (index < 0 || index >= ordering.length) return ordering;
  if (target < 0 || target >= ordering.length) return ordering;
  const next = [...ordering];
  const a = next[index] as string;
  next[index] = next[target] as string;
  next[target] = a;
  return next;
}
