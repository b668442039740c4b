/** DOM wiring. All decision logic lives in state.ts / render.ts so it can
 * be unit tested; this file only binds it to the page. */

import { ApiRequestError, WorkbenchApi } from "./api.js";
import {
  blockReason, canSubmit, completedScores, Draft, emptyDraft, isTotalOrder,
  markScored, moveEntry, nextPendingTask, setJustification, setScore,
} from "./state.js";
import { renderGraphSvg } from "./render.js";
import { CRITERIA, type Criterion, type Session, type TaskPayload, type TieBreak } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let api: WorkbenchApi | null = null;
let session: Session | null = null;
let task: TaskPayload | null = null;
let draft: Draft = emptyDraft();
let showRaw = false;
let tiebreaks: TieBreak[] = [];
let ordering: string[] = [];
let activeTiebreak: TieBreak | null = null;

function setError(message: string): void {
  const el = $("error");
  el.textContent = message;
  el.hidden = message === "";
}

async function guard<T>(work: () => Promise<T>): Promise<T | null> {
  try {
    setError("");
    return await work();
  } catch (err) {
    if (err instanceof ApiRequestError) {
      setError(`${err.code}: ${err.message}`);
    } else {
      setError(String(err));
    }
    return null;
  }
}

// --- session -----------------------------------------------------------------

async function startSession(): Promise<void> {
  const token = ($("token") as HTMLInputElement).value.trim();
  const mode = ($("mode") as HTMLSelectElement).value as "formal" | "calibration";
  api = new WorkbenchApi("", token);
  const created = await guard(() => api!.createSession(mode));
  if (!created) return;
  session = created;
  $("login").hidden = true;
  $("workbench").hidden = false;
  renderTaskList();
  await refreshTiebreaks();
  const first = nextPendingTask(created);
  if (first) await openTask(first);
}

function renderTaskList(): void {
  if (!session) return;
  const list = $("task-list");
  list.innerHTML = "";
  for (const t of session.tasks) {
    const item = document.createElement("li");
    item.textContent = `${t.dataset_id} ${t.status === "scored" ? "✓" : ""}`;
    item.className = t.status + (task?.id === t.id ? " active" : "");
    item.onclick = () => void openTask(t.id);
    list.appendChild(item);
  }
}

// --- task view ----------------------------------------------------------------

async function openTask(taskId: string): Promise<void> {
  if (!api) return;
  const payload = await guard(() => api!.getTask(taskId));
  if (!payload) return;
  task = payload;
  draft = emptyDraft();
  if (payload.own_score) {
    for (const c of CRITERIA) draft = setScore(draft, c, payload.own_score.scores[c]);
    draft = setJustification(draft, payload.own_score.justification);
  }
  $("requirements").textContent = payload.requirements_text || "(no requirements text)";
  $("dataset-name").textContent = payload.dataset_id;
  renderDiagram();
  renderRubric(payload);
  renderScoreForm();
  renderTaskList();
}

function renderDiagram(): void {
  if (!task) return;
  const holder = $("diagram");
  const notice = $("diagram-notice");
  const svg = renderGraphSvg(task.render_graph);
  if (showRaw || svg === null) {
    holder.innerHTML = `<pre class="plantuml">${task.plantuml
      .replace(/&/g, "&amp;").replace(/</g, "&lt;")}</pre>`;
    notice.hidden = svg !== null;
    notice.textContent = "render graph is empty; showing raw PlantUML";
  } else {
    holder.innerHTML = svg;
    notice.hidden = true;
  }
  ($("raw-toggle") as HTMLButtonElement).textContent =
    showRaw ? "show diagram" : "show raw PlantUML";
}

function renderRubric(payload: TaskPayload): void {
  const holder = $("rubric");
  holder.innerHTML = "";
  for (const crit of payload.rubric.criteria) {
    const details = document.createElement("details");
    const summary = document.createElement("summary");
    summary.textContent = `${crit.id} ${crit.name}`;
    details.appendChild(summary);
    const desc = document.createElement("p");
    desc.textContent = crit.description;
    details.appendChild(desc);
    const bands = document.createElement("ul");
    for (const [score, text] of Object.entries(crit.bands)) {
      const li = document.createElement("li");
      li.textContent = `${score}: ${text}`;
      bands.appendChild(li);
    }
    details.appendChild(bands);
    holder.appendChild(details);
  }
}

function renderScoreForm(): void {
  if (!task) return;
  const form = $("score-rows");
  form.innerHTML = "";
  const scored = task.status === "scored";
  for (const crit of task.rubric.criteria) {
    const row = document.createElement("div");
    row.className = "score-row";
    const label = document.createElement("span");
    label.textContent = `${crit.id} ${crit.name}`;
    row.appendChild(label);
    for (let value = 1; value <= 5; value += 1) {
      const btn = document.createElement("button");
      btn.type = "button";
      btn.textContent = String(value);
      btn.disabled = scored;
      btn.className = draft.scores[crit.id as Criterion] === value ? "selected" : "";
      btn.onclick = () => {
        draft = setScore(draft, crit.id as Criterion, value);
        renderScoreForm();
      };
      row.appendChild(btn);
    }
    form.appendChild(row);
  }
  const justification = $("justification") as HTMLTextAreaElement;
  justification.value = draft.justification;
  justification.disabled = scored;
  justification.oninput = () => {
    draft = setJustification(draft, justification.value);
    updateSubmitState();
  };
  updateSubmitState();
}

function updateSubmitState(): void {
  const button = $("submit-score") as HTMLButtonElement;
  const hint = $("submit-hint");
  const scored = task?.status === "scored";
  button.disabled = scored || !canSubmit(draft);
  hint.textContent = scored
    ? "already scored (formal scores are immutable)"
    : blockReason(draft) ?? "";
}

async function submitScore(): Promise<void> {
  if (!api || !task || !session || !canSubmit(draft)) return;
  const result = await guard(() =>
    api!.submitScore(task!.id, completedScores(draft), draft.justification));
  if (!result) return;
  session = markScored(session, task.id);
  renderTaskList();
  const next = nextPendingTask(session, task.id);
  if (next) {
    await openTask(next);
  } else {
    task = { ...task, status: "scored" };
    updateSubmitState();
  }
}

// --- tie-breaks -----------------------------------------------------------------

async function refreshTiebreaks(): Promise<void> {
  if (!api) return;
  const open = await guard(() => api!.listTiebreaks());
  tiebreaks = open ?? [];
  const list = $("tiebreak-list");
  list.innerHTML = "";
  $("tiebreak-pane").hidden = tiebreaks.length === 0 && !activeTiebreak;
  for (const tb of tiebreaks) {
    const item = document.createElement("li");
    item.textContent = `${tb.dataset_id} / ${tb.judge_id}: ${tb.tied.join(" vs ")}`;
    item.onclick = () => openTiebreak(tb);
    list.appendChild(item);
  }
}

function openTiebreak(tb: TieBreak): void {
  activeTiebreak = tb;
  ordering = [...tb.tied];
  const panes = $("tiebreak-candidates");
  panes.innerHTML = "";
  for (const generator of tb.tied) {
    const pane = document.createElement("div");
    pane.className = "candidate-pane";
    const title = document.createElement("h4");
    title.textContent = generator;
    pane.appendChild(title);
    const pre = document.createElement("pre");
    pre.textContent = tb.candidate_texts[generator] ?? "(no text)";
    pane.appendChild(pre);
    panes.appendChild(pane);
  }
  renderOrdering();
  $("tiebreak-editor").hidden = false;
}

function renderOrdering(): void {
  const list = $("ordering");
  list.innerHTML = "";
  ordering.forEach((generator, index) => {
    const item = document.createElement("li");
    item.draggable = true;
    item.textContent = `${index + 1}. ${generator}`;
    item.ondragstart = (ev) => ev.dataTransfer?.setData("text/plain", String(index));
    item.ondragover = (ev) => ev.preventDefault();
    item.ondrop = (ev) => {
      ev.preventDefault();
      const from = Number(ev.dataTransfer?.getData("text/plain"));
      if (Number.isInteger(from) && from !== index) {
        const next = [...ordering];
        const [moved] = next.splice(from, 1);
        next.splice(index, 0, moved as string);
        ordering = next;
        renderOrdering();
      }
    };
    const up = document.createElement("button");
    up.textContent = "↑";
    up.onclick = () => { ordering = moveEntry(ordering, index, -1); renderOrdering(); };
    const down = document.createElement("button");
    down.textContent = "↓";
    down.onclick = () => { ordering = moveEntry(ordering, index, 1); renderOrdering(); };
    item.append(" ", up, down);
    list.appendChild(item);
  });
}

async function submitOrdering(): Promise<void> {
  if (!api || !activeTiebreak) return;
  if (!isTotalOrder(ordering, activeTiebreak.tied)) {
    setError("ordering must rank every tied candidate exactly once");
    return;
  }
  const resolved = await guard(() =>
    api!.resolveTiebreak(activeTiebreak!.id, ordering));
  if (!resolved) return;
  activeTiebreak = null;
  $("tiebreak-editor").hidden = true;
  await refreshTiebreaks();
}

// --- bootstrap --------------------------------------------------------------------

window.addEventListener("DOMContentLoaded", () => {
  $("start").onclick = () => void startSession();
  $("submit-score").onclick = () => void submitScore();
  $("raw-toggle").onclick = () => { showRaw = !showRaw; renderDiagram(); };
  $("submit-ordering").onclick = () => void submitOrdering();
});
