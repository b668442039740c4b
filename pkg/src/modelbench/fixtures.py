"""Fixture builders: reconstructed corpus, synthetic replay transcripts, and
run directories materialized from the published reference tables.

The requirement texts are NOT the original study documents (those are not
published); they are deterministic placeholders matched to the published
per-dataset counts, and every manifest entry carries ``reconstructed: true``.
The replay transcript store is synthesized so that a full offline
generate -> judge pipeline round reproduces the published rankings and
rubric scores exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import published
from .corpus import load_corpus
from .llm_gateway import BackendConfig, ChatRequest, TranscriptStore
from .pipeline import CandidateDiagram, RunStore
from .prompt_kit import (render_generation_prompt, render_pairwise_prompt,
                         render_scoring_prompt)
from .scoring import RubricScore
from .uml_model import parse_and_validate

SUBJECT_GENERATOR = "gpt"

_DOMAIN_ENTITIES = {
    "g14-datahub": ("DataHub", "Dataset", "Publisher", "Catalog", "UserAccount"),
    "g04-recycling": ("RecyclingCenter", "Resident", "PickupRequest", "Container", "Reward"),
    "g12-camperplus": ("Camp", "Camper", "Parent", "Registration", "Activity"),
    "UHOPE": ("Patient", "Clinician", "CarePlan", "Appointment", "Ward"),
    "autopilot": ("Autopilot", "Sensor", "Actuator", "FlightPlan", "Alarm"),
    "FiniteStateMachine": ("StateMachine", "State", "Transition", "Event", "Guard"),
    "Inventory": ("Inventory", "Item", "Warehouse", "StockOrder", "Supplier"),
    "Pacemaker": ("Pacemaker", "Lead", "PulseGenerator", "Cardiologist", "Telemetry"),
}

_US_ROLES = ("user", "administrator", "operator", "manager")
_ACTIONS = ("register", "view", "update", "archive", "search", "export",
            "monitor", "configure")


def _requirement_line(dataset_id: str, kind: str, index: int) -> str:
    entities = _DOMAIN_ENTITIES[dataset_id]
    entity = entities[index % len(entities)]
    action = _ACTIONS[index % len(_ACTIONS)]
    if kind == "us":
        role = _US_ROLES[index % len(_US_ROLES)]
        return (f"As a {role}, I want to {action} the {entity} record "
                f"so that requirement {index} is met (reconstructed placeholder).")
    return (f"The system shall {action} the {entity} data within the bounds of "
            f"requirement {index} (reconstructed placeholder).")


def write_fixture_corpus(dest: str | Path) -> Path:
    """Write the reconstructed 8-dataset corpus; returns the corpus root."""
    root = Path(dest)
    root.mkdir(parents=True, exist_ok=True)
    manifest = {
        "datasets": [
            {"id": d["id"], "domain": d["domain"], "kind": d["kind"],
             "expected_req_count": d["req_count"], "reconstructed": True}
            for d in published.DATASETS
        ]
    }
    (root / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    for d in published.DATASETS:
        lines = [_requirement_line(d["id"], d["kind"], i + 1)
                 for i in range(d["req_count"])]
        (root / f"{d['id']}.txt").write_text("\n".join(lines) + "\n",
                                             encoding="utf-8")
    return root


# --- fixture backends --------------------------------------------------------

_GENERATOR_MODELS = {
    "gpt": "gpt-5", "claude": "claude-sonnet-4", "gemini": "gemini-2.5-flash",
    "llama": "llama-3.1-8b-instruct",
}
_JUDGE_MODELS = {"grok": "grok", "mistral": "mistral-small-3.1-24b"}


def fixture_backends() -> tuple[list[BackendConfig], list[BackendConfig]]:
    """(generators, judges) with fixed decode params for reproducible hashes."""
    generators = [
        BackendConfig(id=g, endpoint="http://replay.invalid/v1/chat",
                      model_name=_GENERATOR_MODELS[g], temperature=0.2,
                      max_output_tokens=4096)
        for g in published.GENERATORS
    ]
    judges = [
        BackendConfig(id=j, endpoint="http://replay.invalid/v1/chat",
                      model_name=_JUDGE_MODELS[j], temperature=0.0,
                      max_output_tokens=2048)
        for j in published.LLM_JUDGES
    ]
    return generators, judges


# --- synthetic diagrams --------------------------------------------------------

def synthesize_diagram(dataset_id: str, generator_id: str) -> str:
    """Deterministic PlantUML diagram standing in for an unpublished response.

    The four generators get a quality ladder (entity coverage, typing,
    multiplicities) so pairwise prompts differ meaningfully per candidate.
    """
    entities = _DOMAIN_ENTITIES[dataset_id]
    depth = {"gpt": 5, "claude": 4, "gemini": 4, "llama": 3}[generator_id]
    used = entities[:depth]
    hub, rest = used[0], used[1:]
    lines = ["@startuml", f'package "{dataset_id.replace("-", "_")}_core" {{']
    lines.append(f"  class {hub} {{")
    lines.append("    +id : int")
    lines.append("    +name : String")
    if generator_id != "llama":
        lines.append("    +refresh() : void")
    lines.append("  }")
    for i, entity in enumerate(rest):
        lines.append(f"  class {entity} {{")
        if generator_id == "llama" and i == 0:
            lines.append("    +label : String")
        else:
            lines.append("    +id : int")
            lines.append("    +describe() : String")
        lines.append("  }")
    lines.append("}")
    for i, entity in enumerate(rest):
        if generator_id == "llama":
            lines.append(f"{hub} --> {entity}")
        elif generator_id == "gemini" and i == 0:
            lines.append(f'{hub} --> "0..*" {entity}')
        else:
            mult = "1..*" if i % 2 else "0..*"
            lines.append(f'{hub} --> "{mult}" {entity} : manages')
    if generator_id in ("gpt", "claude"):
        lines.append(f"{rest[0]} --|> {hub}")
    return "\n".join(lines) + "\n@enduml"


def _generation_response(dataset_id: str, generator_id: str) -> str:
    diagram = synthesize_diagram(dataset_id, generator_id)
    return f"```plantuml\n{diagram}\n```\n"


def _pairwise_response(judge_id: str, dataset_id: str, a_gen: str,
                       b_gen: str) -> str:
    ranks = published.RANKINGS[dataset_id][judge_id]
    winner = "A" if ranks[a_gen] < ranks[b_gen] else "B"
    score_lines = "\n".join(
        f"{i}: {max(1, 6 - ranks[a_gen])}/{max(1, 6 - ranks[b_gen])}"
        for i in range(1, 6))
    return (f"Winner: {winner}\n"
            f"Justification: Candidate {winner} models the domain entities and "
            f"multiplicities more faithfully; the other candidate omits "
            f"relationships that the context requires.\n{score_lines}\n")


def _scoring_response(judge_id: str, dataset_id: str) -> str:
    scores = published.SCORES[judge_id][dataset_id]
    lines = [f"{k}) {scores[f'C{k}']}" for k in range(1, 6)]
    lines.append("Justification: graded against the context with the rubric "
                 "bands applied strictly.")
    return "\n".join(lines) + "\n"


def build_replay_transcripts(corpus_root: str | Path,
                             store_path: str | Path) -> TranscriptStore:
    """Synthesize the full transcript store for an offline pipeline round.

    Covers every generation call (4 generators x 8 datasets), every pairwise
    judgment (2 judges x 8 datasets x 6 pairs), and every absolute scoring
    call for the subject generator (2 judges x 8 datasets).
    """
    _, docs = load_corpus(corpus_root)
    docs_by_id = {d.id: d for d in docs}
    generators, judges = fixture_backends()
    store = TranscriptStore(store_path)

    diagrams: dict[tuple[str, str], str] = {}
    for backend in generators:
        for doc in docs:
            response = _generation_response(doc.id, backend.id)
            request = ChatRequest.for_backend(
                backend, render_generation_prompt(doc))
            store.put(request, response)
            diagrams[(doc.id, backend.id)] = synthesize_diagram(doc.id, backend.id)

    generator_ids = sorted(g.id for g in generators)
    for judge in judges:
        for doc in docs:
            for i, a_gen in enumerate(generator_ids):
                for b_gen in generator_ids[i + 1:]:
                    prompt = render_pairwise_prompt(
                        doc, diagrams[(doc.id, a_gen)], diagrams[(doc.id, b_gen)])
                    request = ChatRequest.for_backend(judge, prompt)
                    store.put(request, _pairwise_response(judge.id, doc.id,
                                                          a_gen, b_gen))
    for judge in judges:
        for doc in docs:
            prompt = render_scoring_prompt(
                doc, diagrams[(doc.id, SUBJECT_GENERATOR)])
            request = ChatRequest.for_backend(judge, prompt)
            store.put(request, _scoring_response(judge.id, doc.id))
    return store


# --- run import ----------------------------------------------------------------

def reference_scores(rater_kind: str | None = None) -> list[RubricScore]:
    """The published rubric scores as RubricScore objects, optionally
    filtered to one rater kind ("llm_judge" or "human")."""
    out = []
    for rater in (*published.LLM_JUDGES, *published.HUMAN_RATERS):
        kind = "human" if rater in published.HUMAN_RATERS else "llm_judge"
        if rater_kind is not None and kind != rater_kind:
            continue
        for dataset in published.DATASET_ORDER:
            out.append(RubricScore(
                rater_id=rater, rater_kind=kind, dataset_id=dataset,
                scores=dict(published.SCORES[rater][dataset]),
                justification="imported from the published score tables",
                created_at=""))
    return out


def import_human_scores(run_dir: str | Path) -> int:
    """Append the published human-rater scores to an existing run.

    Stands in for the live human-in-the-loop stage during offline replay
    rounds; existing (rater, dataset) human cells are left untouched.
    """
    store = RunStore(run_dir)
    existing = {(s.rater_id, s.dataset_id) for s in store.load_scores()
                if s.rater_kind == "human"}
    added = 0
    for score in reference_scores():
        if score.rater_kind != "human":
            continue
        if (score.rater_id, score.dataset_id) in existing:
            continue
        store.append_score(score)
        added += 1
    return added


def import_paper_run(run_dir: str | Path, corpus_root: str | Path | None = None,
                     with_candidates: bool = True,
                     include_human_scores: bool = True) -> RunStore:
    """Materialize a complete run directory from the published tables.

    Writes rank tables for both judges, the rubric score set, empty
    tie-break state, and (optionally) synthetic candidate diagrams so the
    scoring workbench has something to display. Set
    ``include_human_scores=False`` to leave the human cells open for a live
    workbench session over the fixture run.
    """
    store = RunStore(run_dir)
    store.run_dir.mkdir(parents=True, exist_ok=True)

    from .pipeline import RankTable  # local import keeps module load light
    tables = []
    for dataset, per_judge in published.RANKINGS.items():
        for judge, ranks in per_judge.items():
            tables.append(RankTable(dataset_id=dataset, judge_id=judge,
                                    ranks=dict(ranks), provenance="derived"))
    store.save_ranks(tables)
    store.save_tiebreaks([])

    if store.scores_path.exists():
        store.scores_path.unlink()
    for score in reference_scores():
        if score.rater_kind == "human" and not include_human_scores:
            continue
        store.append_score(score)

    if with_candidates:
        for generator in published.GENERATORS:
            for dataset in published.DATASET_ORDER:
                plantuml = synthesize_diagram(dataset, generator)
                _, report = parse_and_validate(plantuml)
                store.save_candidate(CandidateDiagram(
                    dataset_id=dataset, generator_id=generator,
                    raw_response=_generation_response(dataset, generator),
                    plantuml=plantuml, validation=report, created_at=""))

    corpus_path = str(corpus_root) if corpus_root else ""
    store.write_meta({
        "run_id": store.run_dir.name,
        "source": "published-tables",
        "corpus": corpus_path,
        "generators": list(published.GENERATORS),
        "judges": list(published.LLM_JUDGES),
        "subject_generator": SUBJECT_GENERATOR,
        "dataset_order": list(published.DATASET_ORDER),
        "mode": "fixture",
    })
    return store


def write_fixture_config(dest: str | Path, corpus_root: str | Path,
                         transcripts: str | Path, run_id: str = "replay-demo",
                         output_root: str | Path = "runs") -> Path:
    """Write a run-config JSON wired to the fixture backends and transcripts."""
    generators, judges = fixture_backends()

    def backend_json(b: BackendConfig) -> dict:
        return {"id": b.id, "endpoint": b.endpoint, "model_name": b.model_name,
                "auth_env_var": b.auth_env_var,
                "decode": {"temperature": b.temperature,
                           "max_output_tokens": b.max_output_tokens}}

    config = {
        "corpus": str(corpus_root),
        "run_id": run_id,
        "output_root": str(output_root),
        "mode": "replay",
        "transcripts": str(transcripts),
        "parallelism": 2,
        "generators": [backend_json(b) for b in generators],
        "judges": [backend_json(b) for b in judges],
        "subject_generator": SUBJECT_GENERATOR,
    }
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    dest.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return dest
