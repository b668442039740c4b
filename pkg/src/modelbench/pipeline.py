"""Orchestration: generation across generators x datasets, pairwise judge
tournaments with Copeland rank aggregation and human tie-break escalation,
and absolute rubric scoring.

Run artifacts live under ``runs/<run-id>/``: one JSON file per candidate in
``candidates/``, ``pairwise.jsonl``, ``ranks.json``, ``scores.jsonl``, and
``tiebreaks.json``.
"""

from __future__ import annotations

import itertools
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import scoring
from .corpus import RequirementsDoc
from .llm_gateway import ChatRequest, GatewayError, LlmGateway
from .prompt_kit import (ExtractionError, ScoreParseError, extract_plantuml_block,
                         parse_absolute_scores, parse_pairwise_verdict,
                         render_generation_prompt, render_pairwise_prompt,
                         render_scoring_prompt, PairwiseVerdict)
from .scoring import RubricScore
from .uml_model import ValidationReport, parse_and_validate

logger = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    pass


def _utcnow() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


@dataclass
class CandidateDiagram:
    dataset_id: str
    generator_id: str
    raw_response: str
    plantuml: str
    validation: ValidationReport
    created_at: str = ""
    extraction_warnings: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "generator_id": self.generator_id,
            "raw_response": self.raw_response,
            "plantuml": self.plantuml,
            "validation": self.validation.to_json(),
            "created_at": self.created_at,
            "extraction_warnings": list(self.extraction_warnings),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CandidateDiagram":
        return cls(
            dataset_id=obj["dataset_id"],
            generator_id=obj["generator_id"],
            raw_response=obj.get("raw_response", ""),
            plantuml=obj.get("plantuml", ""),
            validation=ValidationReport.from_json(obj.get("validation", [])),
            created_at=obj.get("created_at", ""),
            extraction_warnings=tuple(obj.get("extraction_warnings", [])),
        )


@dataclass(frozen=True)
class PairwiseResult:
    dataset_id: str
    judge_id: str
    a_generator: str
    b_generator: str
    verdict: PairwiseVerdict
    flags: tuple[str, ...] = ()

    def winner_generator(self) -> str | None:
        if self.verdict.winner == "A":
            return self.a_generator
        if self.verdict.winner == "B":
            return self.b_generator
        return None

    def to_json(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "judge_id": self.judge_id,
            "a_generator": self.a_generator,
            "b_generator": self.b_generator,
            "winner": self.verdict.winner,
            "justification": self.verdict.justification,
            "criterion_scores": {str(k): v for k, v in
                                 self.verdict.criterion_scores.items()},
            "flags": list(self.flags),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PairwiseResult":
        verdict = PairwiseVerdict(
            winner=obj["winner"],
            justification=obj.get("justification", ""),
            criterion_scores={int(k): v for k, v in
                              obj.get("criterion_scores", {}).items()},
        )
        return cls(dataset_id=obj["dataset_id"], judge_id=obj["judge_id"],
                   a_generator=obj["a_generator"], b_generator=obj["b_generator"],
                   verdict=verdict, flags=tuple(obj.get("flags", [])))


@dataclass
class RankTable:
    dataset_id: str
    judge_id: str
    ranks: dict[str, int]
    provenance: str = "derived"  # derived | human_tiebreak
    win_counts: dict[str, int] = field(default_factory=dict)

    def is_permutation(self) -> bool:
        return sorted(self.ranks.values()) == list(range(1, len(self.ranks) + 1))

    def to_json(self) -> dict:
        return {"dataset_id": self.dataset_id, "judge_id": self.judge_id,
                "ranks": self.ranks, "provenance": self.provenance,
                "win_counts": self.win_counts}

    @classmethod
    def from_json(cls, obj: dict) -> "RankTable":
        return cls(dataset_id=obj["dataset_id"], judge_id=obj["judge_id"],
                   ranks={k: int(v) for k, v in obj["ranks"].items()},
                   provenance=obj.get("provenance", "derived"),
                   win_counts={k: int(v) for k, v in
                               obj.get("win_counts", {}).items()})


@dataclass
class TieBreakTask:
    id: str
    dataset_id: str
    judge_id: str
    tied: tuple[str, ...]
    candidate_texts: dict[str, str] = field(default_factory=dict)
    status: str = "open"  # open | resolved
    resolution: tuple[str, ...] | None = None
    resolver_id: str | None = None

    def to_json(self) -> dict:
        return {"id": self.id, "dataset_id": self.dataset_id,
                "judge_id": self.judge_id, "tied": list(self.tied),
                "candidate_texts": self.candidate_texts, "status": self.status,
                "resolution": list(self.resolution) if self.resolution else None,
                "resolver_id": self.resolver_id}

    @classmethod
    def from_json(cls, obj: dict) -> "TieBreakTask":
        return cls(id=obj["id"], dataset_id=obj["dataset_id"],
                   judge_id=obj["judge_id"], tied=tuple(obj["tied"]),
                   candidate_texts=obj.get("candidate_texts", {}),
                   status=obj.get("status", "open"),
                   resolution=tuple(obj["resolution"]) if obj.get("resolution") else None,
                   resolver_id=obj.get("resolver_id"))


# --- generation ----------------------------------------------------------------

def generate_candidate(doc: RequirementsDoc, backend_id: str,
                       gateway: LlmGateway) -> CandidateDiagram:
    """Generate, extract, parse, and validate one diagram; never raises."""
    backend = gateway.backend(backend_id)
    prompt = render_generation_prompt(doc)
    request = ChatRequest.for_backend(backend, prompt)
    report = ValidationReport()
    raw = plantuml = ""
    warnings: tuple[str, ...] = ()
    try:
        raw = gateway.send(request)
    except GatewayError as exc:
        report.add("backend-failure", "error", 0, str(exc))
        return CandidateDiagram(dataset_id=doc.id, generator_id=backend_id,
                                raw_response="", plantuml="", validation=report,
                                created_at=_utcnow())
    try:
        block = extract_plantuml_block(raw)
        plantuml, warnings = block.text, block.warnings
    except ExtractionError as exc:
        report.add("no-plantuml-found", "error", 0, str(exc))
        return CandidateDiagram(dataset_id=doc.id, generator_id=backend_id,
                                raw_response=raw, plantuml="", validation=report,
                                created_at=_utcnow())
    _, parse_report = parse_and_validate(plantuml)
    report.extend(parse_report)
    for w in warnings:
        report.add(f"extraction-{w}", "warning", 0,
                   f"PlantUML extraction note: {w}")
    return CandidateDiagram(dataset_id=doc.id, generator_id=backend_id,
                            raw_response=raw, plantuml=plantuml,
                            validation=report, created_at=_utcnow(),
                            extraction_warnings=warnings)


def run_generation(docs: list[RequirementsDoc], generator_ids: list[str],
                   gateway: LlmGateway) -> list[CandidateDiagram]:
    """One candidate per (generator, dataset); failures become candidates
    with error-bearing validation reports rather than being dropped."""
    out: list[CandidateDiagram] = []
    for backend_id in generator_ids:
        for doc in docs:
            out.append(generate_candidate(doc, backend_id, gateway))
    return out


# --- pairwise tournament ---------------------------------------------------------

def _judge_pair(judge_id: str, doc: RequirementsDoc, cand_a: CandidateDiagram,
                cand_b: CandidateDiagram, gateway: LlmGateway
                ) -> tuple[PairwiseVerdict, tuple[str, ...]]:
    backend = gateway.backend(judge_id)
    prompt = render_pairwise_prompt(doc, cand_a.plantuml, cand_b.plantuml)
    try:
        response = gateway.send(ChatRequest.for_backend(backend, prompt))
    except GatewayError as exc:
        logger.warning("judge %s failed on (%s, %s): %s", judge_id,
                       cand_a.generator_id, cand_b.generator_id, exc)
        return PairwiseVerdict(winner="tie_or_unparseable",
                               justification=str(exc)), ("judge-failure",)
    return parse_pairwise_verdict(response), ()


def run_pairwise(judge_ids: list[str], doc: RequirementsDoc,
                 candidates: list[CandidateDiagram], gateway: LlmGateway,
                 swap_positions: bool = False) -> list[PairwiseResult]:
    """Round-robin: every unordered candidate pair judged by every judge.

    Candidates are blinded as A/B in lexicographic generator order. With
    ``swap_positions`` each pair is judged in both orders and a
    disagreement is demoted to a tie.
    """
    if len(candidates) < 2:
        raise PipelineError("need-two-candidates: pairwise comparison requires "
                            "at least two candidates")
    datasets = {c.dataset_id for c in candidates}
    if datasets != {doc.id}:
        raise PipelineError(f"candidates belong to {sorted(datasets)}, "
                            f"expected only {doc.id!r}")
    ordered = sorted(candidates, key=lambda c: c.generator_id)
    results: list[PairwiseResult] = []
    for judge_id in judge_ids:
        for cand_a, cand_b in itertools.combinations(ordered, 2):
            verdict, flags = _judge_pair(judge_id, doc, cand_a, cand_b, gateway)
            if swap_positions:
                swapped, flags2 = _judge_pair(judge_id, doc, cand_b, cand_a, gateway)
                first = {"A": cand_a.generator_id, "B": cand_b.generator_id
                         }.get(verdict.winner)
                second = {"A": cand_b.generator_id, "B": cand_a.generator_id
                          }.get(swapped.winner)
                if first != second:
                    verdict = PairwiseVerdict(
                        winner="tie_or_unparseable",
                        justification="position-swapped judgments disagree",
                        criterion_scores=verdict.criterion_scores)
                    flags = tuple(set(flags) | set(flags2) | {"position-disagreement"})
            results.append(PairwiseResult(
                dataset_id=doc.id, judge_id=judge_id,
                a_generator=cand_a.generator_id, b_generator=cand_b.generator_id,
                verdict=verdict, flags=flags))
    return results


def derive_ranks(results: list[PairwiseResult],
                 candidate_texts: dict[str, str] | None = None
                 ) -> tuple[RankTable, list[TieBreakTask]]:
    """Copeland ranks from one dataset+judge round-robin.

    Generators are ranked by descending pairwise win count; ties and
    unparseable verdicts award no win. Generators with equal win counts
    share a provisional rank and produce one TieBreakTask per tied group.
    """
    if not results:
        raise PipelineError("no pairwise results to rank")
    datasets = {r.dataset_id for r in results}
    judges = {r.judge_id for r in results}
    if len(datasets) != 1 or len(judges) != 1:
        raise PipelineError("derive_ranks expects results for exactly one "
                            "dataset and one judge")
    dataset_id, judge_id = datasets.pop(), judges.pop()

    generators = sorted({r.a_generator for r in results}
                        | {r.b_generator for r in results})
    expected = {frozenset(p) for p in itertools.combinations(generators, 2)}
    seen: set[frozenset] = set()
    for r in results:
        key = frozenset((r.a_generator, r.b_generator))
        if key in seen:
            raise PipelineError(f"pair {sorted(key)} judged more than once")
        seen.add(key)
    if seen != expected:
        missing = [sorted(p) for p in sorted(expected - seen, key=sorted)]
        raise PipelineError(f"incomplete round-robin; missing pairs {missing}")

    wins = {g: 0 for g in generators}
    for r in results:
        winner = r.winner_generator()
        if winner is not None:
            wins[winner] += 1

    by_wins = sorted(generators, key=lambda g: (-wins[g], g))
    ranks: dict[str, int] = {}
    tasks: list[TieBreakTask] = []
    position = 1
    i = 0
    while i < len(by_wins):
        block = [g for g in by_wins if wins[g] == wins[by_wins[i]]]
        for g in block:
            ranks[g] = position
        if len(block) > 1:
            tied = tuple(sorted(block))
            texts = {g: (candidate_texts or {}).get(g, "") for g in tied}
            tasks.append(TieBreakTask(
                id=f"{dataset_id}:{judge_id}:{'-'.join(tied)}",
                dataset_id=dataset_id, judge_id=judge_id,
                tied=tied, candidate_texts=texts))
        position += len(block)
        i += len(block)
    table = RankTable(dataset_id=dataset_id, judge_id=judge_id, ranks=ranks,
                      provenance="derived", win_counts=wins)
    return table, tasks


def apply_tiebreak(rank_table: RankTable, task: TieBreakTask) -> RankTable:
    """Fold a resolved tie-break ordering back into the rank table."""
    if task.status != "resolved" or not task.resolution:
        raise PipelineError(f"tie-break task {task.id} is not resolved")
    if set(task.resolution) != set(task.tied) or len(task.resolution) != len(task.tied):
        raise PipelineError(
            f"resolution {list(task.resolution)} is not a total order over "
            f"the tied set {list(task.tied)}")
    if (task.dataset_id, task.judge_id) != (rank_table.dataset_id,
                                            rank_table.judge_id):
        raise PipelineError("tie-break task does not belong to this rank table")
    base = min(rank_table.ranks[g] for g in task.tied)
    new_ranks = dict(rank_table.ranks)
    for offset, generator in enumerate(task.resolution):
        new_ranks[generator] = base + offset
    return RankTable(dataset_id=rank_table.dataset_id,
                     judge_id=rank_table.judge_id, ranks=new_ranks,
                     provenance="human_tiebreak",
                     win_counts=rank_table.win_counts)


# --- absolute scoring -------------------------------------------------------------

def run_absolute(judge_ids: list[str], docs_by_id: dict[str, RequirementsDoc],
                 candidates: list[CandidateDiagram], gateway: LlmGateway
                 ) -> list[RubricScore]:
    """Rubric-score one generator's candidates with every judge.

    Unparseable responses are logged and leave the (judge, dataset) cell
    empty for a later retry; they never fabricate a score.
    """
    generators = {c.generator_id for c in candidates}
    if len(generators) != 1:
        raise PipelineError("run_absolute expects candidates of exactly one "
                            f"generator, got {sorted(generators)}")
    out: list[RubricScore] = []
    for judge_id in judge_ids:
        backend = gateway.backend(judge_id)
        for cand in candidates:
            doc = docs_by_id.get(cand.dataset_id)
            if doc is None:
                raise PipelineError(f"no requirements document for dataset "
                                    f"{cand.dataset_id!r}")
            prompt = render_scoring_prompt(doc, cand.plantuml)
            try:
                response = gateway.send(ChatRequest.for_backend(backend, prompt))
                scores = parse_absolute_scores(response)
            except (GatewayError, ScoreParseError) as exc:
                logger.warning("absolute scoring failed for judge %s on %s: %s",
                               judge_id, cand.dataset_id, exc)
                continue
            out.append(RubricScore(
                rater_id=judge_id, rater_kind="llm_judge",
                dataset_id=cand.dataset_id, scores=scores,
                justification=response.strip(), created_at=_utcnow()))
    return out


# --- run store -------------------------------------------------------------------

class RunStore:
    """Filesystem layout for one pipeline run."""

    def __init__(self, run_dir: str | Path):
        self.run_dir = Path(run_dir)

    @property
    def candidates_dir(self) -> Path:
        return self.run_dir / "candidates"

    @property
    def pairwise_path(self) -> Path:
        return self.run_dir / "pairwise.jsonl"

    @property
    def ranks_path(self) -> Path:
        return self.run_dir / "ranks.json"

    @property
    def scores_path(self) -> Path:
        return self.run_dir / "scores.jsonl"

    @property
    def tiebreaks_path(self) -> Path:
        return self.run_dir / "tiebreaks.json"

    @property
    def meta_path(self) -> Path:
        return self.run_dir / "run.json"

    def exists(self) -> bool:
        return self.run_dir.is_dir() and self.meta_path.is_file()

    def write_meta(self, meta: dict) -> None:
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                  encoding="utf-8")

    def read_meta(self) -> dict:
        return json.loads(self.meta_path.read_text(encoding="utf-8"))

    def save_candidate(self, cand: CandidateDiagram) -> Path:
        self.candidates_dir.mkdir(parents=True, exist_ok=True)
        path = self.candidates_dir / f"{cand.dataset_id}__{cand.generator_id}.json"
        path.write_text(json.dumps(cand.to_json(), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        return path

    def load_candidates(self) -> list[CandidateDiagram]:
        if not self.candidates_dir.is_dir():
            return []
        out = []
        for path in sorted(self.candidates_dir.glob("*.json")):
            out.append(CandidateDiagram.from_json(
                json.loads(path.read_text(encoding="utf-8"))))
        return out

    def append_pairwise(self, results: list[PairwiseResult]) -> None:
        self.run_dir.mkdir(parents=True, exist_ok=True)
        with self.pairwise_path.open("a", encoding="utf-8") as fh:
            for r in results:
                fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")

    def load_pairwise(self) -> list[PairwiseResult]:
        if not self.pairwise_path.exists():
            return []
        out = []
        with self.pairwise_path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    out.append(PairwiseResult.from_json(json.loads(line)))
        return out

    def save_ranks(self, tables: list[RankTable]) -> None:
        self.run_dir.mkdir(parents=True, exist_ok=True)
        obj: dict[str, dict] = {}
        for t in tables:
            obj.setdefault(t.dataset_id, {})[t.judge_id] = t.to_json()
        self.ranks_path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                                   encoding="utf-8")

    def load_ranks(self) -> list[RankTable]:
        if not self.ranks_path.exists():
            return []
        obj = json.loads(self.ranks_path.read_text(encoding="utf-8"))
        return [RankTable.from_json(entry)
                for per_judge in obj.values() for entry in per_judge.values()]

    def save_tiebreaks(self, tasks: list[TieBreakTask]) -> None:
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.tiebreaks_path.write_text(
            json.dumps([t.to_json() for t in tasks], indent=2, sort_keys=True) + "\n",
            encoding="utf-8")

    def load_tiebreaks(self) -> list[TieBreakTask]:
        if not self.tiebreaks_path.exists():
            return []
        return [TieBreakTask.from_json(obj) for obj in
                json.loads(self.tiebreaks_path.read_text(encoding="utf-8"))]

    def append_score(self, score: RubricScore) -> None:
        scoring.append_score(self.scores_path, score)

    def load_scores(self) -> list[RubricScore]:
        return scoring.load_scores(self.scores_path)
