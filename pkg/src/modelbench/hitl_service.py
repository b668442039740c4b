"""HTTP service backing the human evaluation workbench.

Serves sessions, scoring tasks (requirements + render graph + raw
PlantUML + rubric), score submission, and judge tie-break resolution for
one run directory. Evaluator identity is a static token list in the
service config; responses never include another evaluator's scores.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import pipeline
from .corpus import load_corpus, requirements_text
from .pipeline import RunStore, TieBreakTask
from .published import CRITERIA
from .scoring import RubricScore, ScoringError
from .uml_model import parse_plantuml, to_render_graph

DEFAULT_EVALUATORS = (
    {"id": "A1", "token": "token-a1"},
    {"id": "A2", "token": "token-a2"},
)


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class EvalTask:
    id: str
    session_id: str
    dataset_id: str
    plantuml: str
    requirements: str
    calibration: bool = False


@dataclass
class EvalSession:
    id: str
    evaluator_id: str
    mode: str  # calibration | formal
    task_ids: list[str]
    created_at: str

    def to_json(self) -> dict:
        return {"id": self.id, "evaluator_id": self.evaluator_id,
                "mode": self.mode, "task_ids": self.task_ids,
                "created_at": self.created_at}


def _load_rubric() -> dict:
    text = resources.files("modelbench").joinpath("data/rubric.json").read_text("utf-8")
    return json.loads(text)


def _load_calibration_set() -> list[dict]:
    base = resources.files("modelbench").joinpath("data/calibration")
    reqs = base.joinpath("requirements.txt").read_text("utf-8")
    out = []
    for i in (1, 2):
        out.append({
            "dataset_id": f"calibration-{i}",
            "plantuml": base.joinpath(f"sample{i}.puml").read_text("utf-8"),
            "requirements": reqs,
        })
    return out


class ServiceState:
    """All mutable state for one served run; mutations are lock-serialized."""

    def __init__(self, run_dir: str | Path,
                 evaluators: tuple[dict, ...] = DEFAULT_EVALUATORS,
                 corpus_root: str | Path | None = None):
        self.store = RunStore(run_dir)
        if not self.store.exists():
            raise ServiceError(404, "run-not-found",
                               f"no run found at {run_dir}")
        self.meta = self.store.read_meta()
        self.run_id = self.meta.get("run_id", Path(run_dir).name)
        self.subject = self.meta.get("subject_generator", "")
        self.tokens = {e["token"]: e["id"] for e in evaluators}
        self.evaluator_ids = {e["id"] for e in evaluators}
        self.rubric = _load_rubric()
        self.calibration_set = _load_calibration_set()
        self.lock = threading.Lock()

        self.candidates = {
            c.dataset_id: c for c in self.store.load_candidates()
            if not self.subject or c.generator_id == self.subject
        }
        self.requirements: dict[str, str] = {}
        corpus = corpus_root or self.meta.get("corpus") or ""
        if corpus and Path(corpus, "manifest.json").is_file():
            _, docs = load_corpus(corpus)
            self.requirements = {d.id: requirements_text(d) for d in docs}

        self.sessions: dict[str, EvalSession] = {}
        self.tasks: dict[str, EvalTask] = {}
        self._load_sessions()

    # --- persistence ---------------------------------------------------------

    @property
    def sessions_path(self) -> Path:
        return self.store.run_dir / "sessions.json"

    def _load_sessions(self) -> None:
        if not self.sessions_path.exists():
            return
        for obj in json.loads(self.sessions_path.read_text(encoding="utf-8")):
            session = EvalSession(**obj)
            self.sessions[session.id] = session
            self._materialize_tasks(session)

    def _save_sessions(self) -> None:
        payload = [s.to_json() for s in self.sessions.values()]
        self.sessions_path.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    # --- evaluators / scores ---------------------------------------------------

    def evaluator_for(self, token: str | None) -> str:
        if not token or token not in self.tokens:
            raise ServiceError(403, "forbidden", "unknown or missing evaluator token")
        return self.tokens[token]

    def scores_for(self, evaluator_id: str) -> dict[tuple[str, bool], RubricScore]:
        out = {}
        for s in self.store.load_scores():
            if s.rater_id == evaluator_id and s.rater_kind == "human":
                out[(s.dataset_id, s.calibration)] = s
        return out

    # --- sessions / tasks -----------------------------------------------------

    def _materialize_tasks(self, session: EvalSession) -> None:
        if session.mode == "calibration":
            for i, sample in enumerate(self.calibration_set):
                task_id = session.task_ids[i]
                self.tasks[task_id] = EvalTask(
                    id=task_id, session_id=session.id,
                    dataset_id=sample["dataset_id"],
                    plantuml=sample["plantuml"],
                    requirements=sample["requirements"], calibration=True)
        else:
            for task_id, dataset_id in zip(session.task_ids,
                                           sorted(self.candidates,
                                                  key=self._dataset_sort_key)):
                cand = self.candidates[dataset_id]
                self.tasks[task_id] = EvalTask(
                    id=task_id, session_id=session.id, dataset_id=dataset_id,
                    plantuml=cand.plantuml,
                    requirements=self.requirements.get(dataset_id, ""))

    def _dataset_sort_key(self, dataset_id: str):
        order = self.meta.get("dataset_order") or list(self.candidates)
        return (order.index(dataset_id) if dataset_id in order else len(order),
                dataset_id)

    def task_status(self, task: EvalTask, evaluator_id: str) -> str:
        scored = self.scores_for(evaluator_id)
        return "scored" if (task.dataset_id, task.calibration) in scored else "pending"

    def create_session(self, evaluator_id: str, mode: str,
                       run_id: str | None) -> EvalSession:
        if evaluator_id not in self.evaluator_ids:
            raise ServiceError(403, "forbidden", f"unknown evaluator {evaluator_id!r}")
        if run_id and run_id != self.run_id:
            raise ServiceError(404, "run-not-found",
                               f"this service hosts run {self.run_id!r}, "
                               f"not {run_id!r}")
        if mode not in ("calibration", "formal"):
            raise ServiceError(400, "bad-mode", f"unknown session mode {mode!r}")
        with self.lock:
            if mode == "formal":
                if not self.candidates:
                    raise ServiceError(409, "no-candidates",
                                       "run has no candidate diagrams to score")
                for existing in self.sessions.values():
                    if (existing.evaluator_id == evaluator_id
                            and existing.mode == "formal"
                            and any(self.task_status(self.tasks[t], evaluator_id)
                                    == "pending" for t in existing.task_ids)):
                        raise ServiceError(409, "session-open",
                                           "evaluator already has an open formal session")
            session_id = f"s{len(self.sessions) + 1}-{evaluator_id}-{mode}"
            if mode == "calibration":
                task_ids = [f"{session_id}__cal{i + 1}"
                            for i in range(len(self.calibration_set))]
            else:
                datasets = sorted(self.candidates, key=self._dataset_sort_key)
                task_ids = [f"{session_id}__{ds}" for ds in datasets]
            session = EvalSession(id=session_id, evaluator_id=evaluator_id,
                                  mode=mode, task_ids=task_ids,
                                  created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ",
                                                           time.gmtime()))
            self.sessions[session_id] = session
            self._materialize_tasks(session)
            self._save_sessions()
            return session

    def get_session(self, session_id: str, evaluator_id: str) -> dict:
        session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "session-not-found",
                               f"no session {session_id!r}")
        if session.evaluator_id != evaluator_id:
            raise ServiceError(403, "forbidden", "not your session")
        payload = session.to_json()
        payload["tasks"] = [
            {"id": t, "dataset_id": self.tasks[t].dataset_id,
             "status": self.task_status(self.tasks[t], evaluator_id)}
            for t in session.task_ids
        ]
        return payload

    def get_task(self, task_id: str, evaluator_id: str) -> dict:
        task = self.tasks.get(task_id)
        if task is None:
            raise ServiceError(404, "task-not-found", f"no task {task_id!r}")
        session = self.sessions[task.session_id]
        if session.evaluator_id != evaluator_id:
            raise ServiceError(403, "forbidden",
                               "task belongs to another evaluator")
        model, _ = parse_plantuml(task.plantuml)
        payload = {
            "id": task.id,
            "dataset_id": task.dataset_id,
            "status": self.task_status(task, evaluator_id),
            "requirements_text": task.requirements,
            "plantuml": task.plantuml,
            "render_graph": to_render_graph(model).to_json(),
            "rubric": self.rubric,
        }
        own = self.scores_for(evaluator_id).get((task.dataset_id, task.calibration))
        if own is not None:
            payload["own_score"] = own.to_json()
        return payload

    def submit_score(self, task_id: str, evaluator_id: str,
                     scores: dict, justification: str) -> RubricScore:
        task = self.tasks.get(task_id)
        if task is None:
            raise ServiceError(404, "task-not-found", f"no task {task_id!r}")
        session = self.sessions[task.session_id]
        if session.evaluator_id != evaluator_id:
            raise ServiceError(403, "forbidden",
                               "task belongs to another evaluator")
        try:
            normalized = {c: int(scores[c]) for c in CRITERIA}
        except (KeyError, TypeError, ValueError):
            raise ServiceError(400, "bad-scores",
                               f"scores must provide integers for {list(CRITERIA)}")
        try:
            score = RubricScore(
                rater_id=evaluator_id, rater_kind="human",
                dataset_id=task.dataset_id, scores=normalized,
                justification=justification.strip(),
                created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                calibration=task.calibration)
        except ScoringError as exc:
            raise ServiceError(400, "bad-scores", str(exc))
        if score.needs_justification() and not score.justification:
            raise ServiceError(400, "justification-required",
                               "a justification is required when any criterion "
                               "is scored 3 or lower")
        with self.lock:
            existing = self.scores_for(evaluator_id)
            if (task.dataset_id, task.calibration) in existing and not task.calibration:
                raise ServiceError(409, "immutable",
                                   "formal scores cannot be resubmitted")
            self.store.append_score(score)
        return score

    # --- tie-breaks -------------------------------------------------------------

    def list_tiebreaks(self) -> list[dict]:
        return [t.to_json() for t in self.store.load_tiebreaks()
                if t.status == "open"]

    def resolve_tiebreak(self, task_id: str, ordering: list[str],
                         evaluator_id: str) -> dict:
        with self.lock:
            tasks = self.store.load_tiebreaks()
            task = next((t for t in tasks if t.id == task_id), None)
            if task is None:
                raise ServiceError(404, "tiebreak-not-found",
                                   f"no tie-break task {task_id!r}")
            if task.status == "resolved":
                raise ServiceError(409, "already-resolved",
                                   f"tie-break {task_id!r} was already resolved")
            if sorted(ordering) != sorted(task.tied):
                raise ServiceError(400, "partial-ordering",
                                   f"ordering must be a total order over "
                                   f"{list(task.tied)}")
            task.status = "resolved"
            task.resolution = tuple(ordering)
            task.resolver_id = evaluator_id
            tables = self.store.load_ranks()
            for i, table in enumerate(tables):
                if (table.dataset_id, table.judge_id) == (task.dataset_id,
                                                          task.judge_id):
                    tables[i] = pipeline.apply_tiebreak(table, task)
                    break
            else:
                raise ServiceError(409, "rank-table-missing",
                                   "no rank table for this tie-break")
            self.store.save_ranks(tables)
            self.store.save_tiebreaks(tasks)
            return task.to_json()


def create_app(run_dir: str | Path,
               evaluators: tuple[dict, ...] = DEFAULT_EVALUATORS,
               corpus_root: str | Path | None = None,
               static_dir: str | Path | None = None) -> FastAPI:
    state = ServiceState(run_dir, evaluators=evaluators, corpus_root=corpus_root)
    app = FastAPI(title="modelbench HITL service")
    app.state.service = state

    @app.exception_handler(ServiceError)
    async def _handle(_request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.get("/api/v1/health")
    async def health():
        return {"status": "ok", "run_id": state.run_id,
                "subject_generator": state.subject}

    @app.post("/api/v1/sessions", status_code=201)
    async def create_session(body: dict,
                             x_evaluator_token: str | None = Header(default=None)):
        evaluator = state.evaluator_for(x_evaluator_token)
        requested = body.get("evaluator_id", evaluator)
        if requested != evaluator:
            raise ServiceError(403, "forbidden",
                               "token does not match evaluator_id")
        session = state.create_session(evaluator, body.get("mode", "formal"),
                                       body.get("run_id"))
        return state.get_session(session.id, evaluator)

    @app.get("/api/v1/sessions/{session_id}")
    async def get_session(session_id: str,
                          x_evaluator_token: str | None = Header(default=None)):
        evaluator = state.evaluator_for(x_evaluator_token)
        return state.get_session(session_id, evaluator)

    @app.get("/api/v1/tasks/{task_id}")
    async def get_task(task_id: str,
                       x_evaluator_token: str | None = Header(default=None)):
        evaluator = state.evaluator_for(x_evaluator_token)
        return state.get_task(task_id, evaluator)

    @app.post("/api/v1/tasks/{task_id}/scores", status_code=201)
    async def submit_score(task_id: str, body: dict,
                           x_evaluator_token: str | None = Header(default=None)):
        evaluator = state.evaluator_for(x_evaluator_token)
        score = state.submit_score(task_id, evaluator,
                                   body.get("scores", {}),
                                   body.get("justification", ""))
        return score.to_json()

    @app.get("/api/v1/tiebreaks")
    async def list_tiebreaks(x_evaluator_token: str | None = Header(default=None)):
        state.evaluator_for(x_evaluator_token)
        return state.list_tiebreaks()

    @app.post("/api/v1/tiebreaks/{task_id}/resolution")
    async def resolve_tiebreak(task_id: str, body: dict,
                               x_evaluator_token: str | None = Header(default=None)):
        evaluator = state.evaluator_for(x_evaluator_token)
        return state.resolve_tiebreak(task_id, body.get("ordering", []), evaluator)

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="workbench")
    return app
