"""Walkthrough: the full offline pipeline, programmatically.

Builds the fixture corpus and synthetic replay transcripts in a temporary
directory, runs generation -> pairwise judging -> rank derivation ->
absolute scoring entirely from the transcript store (no network), then
emits the report files and checks them against the published values.

Run with: python demos/03_replay_pipeline.py
"""

import tempfile
from pathlib import Path

from modelbench import fixtures, report
from modelbench.corpus import load_corpus
from modelbench.llm_gateway import LlmGateway, TranscriptStore
from modelbench.pipeline import derive_ranks, run_absolute, run_generation, run_pairwise

workdir = Path(tempfile.mkdtemp(prefix="modelbench-demo-"))
print(f"working in {workdir}")

corpus_root = fixtures.write_fixture_corpus(workdir / "corpus")
store_path = workdir / "transcripts.jsonl"
fixtures.build_replay_transcripts(corpus_root, store_path)
manifest, docs = load_corpus(corpus_root)
docs_by_id = {d.id: d for d in docs}

generators, judges = fixtures.fixture_backends()
gateway = LlmGateway(generators + judges, mode="replay",
                     store=TranscriptStore(store_path))

# 1. Generation: one candidate per (generator, dataset), each extracted,
#    parsed, and validated. Failures become error-bearing candidates.
candidates = run_generation(docs, [g.id for g in generators], gateway)
clean = sum(c.validation.ok for c in candidates)
print(f"generated {len(candidates)} candidates, {clean} parse without errors")

# 2. Pairwise tournaments: every unordered pair, every judge, per dataset;
#    Copeland win counts become ranks, equal counts become tie-break tasks.
rank_tables = []
for dataset_id in manifest.dataset_order():
    cands = [c for c in candidates if c.dataset_id == dataset_id]
    results = run_pairwise([j.id for j in judges], docs_by_id[dataset_id],
                           cands, gateway)
    for judge in judges:
        table, ties = derive_ranks([r for r in results if r.judge_id == judge.id])
        rank_tables.append(table)
        assert not ties, "fixture transcripts encode strict rankings"
print(f"derived {len(rank_tables)} rank tables")

# 3. Absolute scoring of the top-ranked generator by both judges, plus the
#    published human scores standing in for the live evaluation session.
subject = [c for c in candidates if c.generator_id == fixtures.SUBJECT_GENERATOR]
scores = run_absolute([j.id for j in judges], docs_by_id, subject, gateway)
scores.extend(fixtures.reference_scores(rater_kind="human"))
print(f"collected {len(scores)} rubric scores")

# 4. Statistics and emission: every emitted number traces to the inputs
#    via the embedded fingerprint, and the reference check pins the cells.
agreement = report.build_report(rank_tables, scores,
                                dataset_order=list(manifest.dataset_order()))
print(f"kappa: llm={agreement.kappa['llm']:.4f} "
      f"human={agreement.kappa['human']:.4f} "
      f"consensus={agreement.kappa['consensus']:.4f}")
files = report.emit(agreement, workdir / "reports")
print(f"emitted {[f.name for f in files]}")
mismatches = report.check_paper(agreement)
print(f"reference check: {'pass' if not mismatches else mismatches}")
