"""Command-line entry point: generate, judge, stats, report, serve, fixtures.

Exit codes: 0 success, 1 reference-check failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import fixtures as fixture_tools
from . import report as report_mod
from .corpus import CorpusError, load_corpus
from .llm_gateway import BackendConfig, LlmGateway, TranscriptStore
from .pipeline import (PipelineError, RunStore, derive_ranks, run_absolute,
                       run_generation, run_pairwise)
from .report import ReportError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    corpus: Path
    run_id: str
    output_root: Path
    mode: str
    transcripts: Path | None
    parallelism: int
    generators: list[BackendConfig]
    judges: list[BackendConfig]
    subject_generator: str

    @property
    def run_dir(self) -> Path:
        return self.output_root / self.run_id

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        generators = [BackendConfig.from_json(b) for b in raw.get("generators", [])]
        judges = [BackendConfig.from_json(b) for b in raw.get("judges", [])]
        if not generators:
            raise ConfigError("config lists no generator backends")
        gen_ids = {b.id for b in generators}
        judge_ids = {b.id for b in judges}
        if gen_ids & judge_ids:
            raise ConfigError(f"judge ids must be disjoint from generator ids; "
                              f"overlap: {sorted(gen_ids & judge_ids)}")
        mode = raw.get("mode", "replay")
        transcripts = raw.get("transcripts")
        if mode in ("record", "replay") and not transcripts:
            raise ConfigError(f"{mode} mode requires a 'transcripts' path")
        return cls(
            corpus=Path(raw["corpus"]),
            run_id=raw.get("run_id", "run"),
            output_root=Path(raw.get("output_root", "runs")),
            mode=mode,
            transcripts=Path(transcripts) if transcripts else None,
            parallelism=int(raw.get("parallelism", 2)),
            generators=generators,
            judges=judges,
            subject_generator=raw.get("subject_generator", ""),
        )

    def gateway(self) -> LlmGateway:
        store = TranscriptStore(self.transcripts) if self.transcripts else None
        return LlmGateway(self.generators + self.judges, mode=self.mode,
                          store=store, max_in_flight=self.parallelism)


def _load_run_inputs(config: RunConfig):
    manifest, docs = load_corpus(config.corpus)
    return manifest, docs


def _write_meta(config: RunConfig, store: RunStore, dataset_order) -> None:
    store.write_meta({
        "run_id": config.run_id,
        "corpus": str(config.corpus),
        "mode": config.mode,
        "generators": [b.id for b in config.generators],
        "judges": [b.id for b in config.judges],
        "subject_generator": config.subject_generator,
        "dataset_order": list(dataset_order),
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    })


# --- commands ---------------------------------------------------------------------

def cmd_generate(args) -> int:
    config = RunConfig.load(args.config)
    if args.run_id:
        config.run_id = args.run_id
    manifest, docs = _load_run_inputs(config)
    gateway = config.gateway()
    store = RunStore(config.run_dir)
    _write_meta(config, store, manifest.dataset_order())
    candidates = run_generation(docs, [b.id for b in config.generators], gateway)
    failures = []
    for cand in candidates:
        store.save_candidate(cand)
        if not cand.validation.ok:
            failures.append((cand.generator_id, cand.dataset_id,
                             sorted({v.code for v in cand.validation.errors})))
    print(f"generated {len(candidates)} candidates "
          f"({len(config.generators)} generators x {len(docs)} datasets) "
          f"into {store.candidates_dir}")
    for gen, ds, codes in failures:
        print(f"  [error] {gen} on {ds}: {codes}")
    if failures and len(failures) == len(candidates):
        print("all candidates failed")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_judge(args) -> int:
    config = RunConfig.load(args.config)
    if args.run_id:
        config.run_id = args.run_id
    manifest, docs = _load_run_inputs(config)
    docs_by_id = {d.id: d for d in docs}
    gateway = config.gateway()
    store = RunStore(config.run_dir)
    candidates = store.load_candidates()
    if not candidates:
        print(f"no candidates in {store.candidates_dir}; run generate first",
              file=sys.stderr)
        return EXIT_USAGE
    judge_ids = [b.id for b in config.judges]
    if not judge_ids:
        print("config lists no judge backends", file=sys.stderr)
        return EXIT_USAGE

    if args.absolute:
        subject = [c for c in candidates if c.generator_id == args.absolute]
        if not subject:
            print(f"no candidates for generator {args.absolute!r}", file=sys.stderr)
            return EXIT_USAGE
        existing = {(s.rater_id, s.dataset_id) for s in store.load_scores()
                    if s.rater_kind == "llm_judge"}
        scores = run_absolute(judge_ids, docs_by_id, subject, gateway)
        added = 0
        for score in scores:
            if (score.rater_id, score.dataset_id) not in existing:
                store.append_score(score)
                added += 1
        print(f"absolute scoring: {added} new scores "
              f"({len(judge_ids)} judges x {len(subject)} datasets) "
              f"-> {store.scores_path}")
        return EXIT_OK

    by_dataset: dict[str, list] = {}
    for cand in candidates:
        by_dataset.setdefault(cand.dataset_id, []).append(cand)
    store.pairwise_path.unlink(missing_ok=True)
    tables, tasks = [], []
    total = 0
    for dataset_id in manifest.dataset_order():
        cands = by_dataset.get(dataset_id)
        if not cands:
            continue
        doc = docs_by_id[dataset_id]
        results = run_pairwise(judge_ids, doc, cands, gateway,
                               swap_positions=args.swap_positions)
        store.append_pairwise(results)
        total += len(results)
        texts = {c.generator_id: c.plantuml for c in cands}
        for judge_id in judge_ids:
            judge_results = [r for r in results if r.judge_id == judge_id]
            table, open_tasks = derive_ranks(judge_results, candidate_texts=texts)
            tables.append(table)
            tasks.extend(open_tasks)
    store.save_ranks(tables)
    store.save_tiebreaks(tasks)
    print(f"pairwise judging: {total} verdicts, {len(tables)} rank tables, "
          f"{len(tasks)} open tie-break task(s)")
    return EXIT_OK


def _report_for_run(run_dir: str, corpus: str | None):
    store = RunStore(run_dir)
    rank_tables = store.load_ranks()
    scores = store.load_scores()
    dataset_order = None
    corpus_path = corpus or (store.read_meta().get("corpus")
                             if store.exists() else None)
    if corpus_path and Path(corpus_path, "manifest.json").is_file():
        manifest, _ = load_corpus(corpus_path)
        dataset_order = list(manifest.dataset_order())
    return store, report_mod.build_report(rank_tables, scores,
                                          dataset_order=dataset_order)


def cmd_stats(args) -> int:
    try:
        _, report = _report_for_run(args.run_dir, args.corpus)
    except (ReportError, ValueError) as exc:
        print(f"cannot compute statistics: {exc}", file=sys.stderr)
        return EXIT_USAGE
    k = report.kappa
    print(f"input fingerprint: {report.source_hash}")
    print(f"kappa {k['llm_pair'][0]}/{k['llm_pair'][1]}: {k['llm']:.4f}")
    print(f"kappa {k['human_pair'][0]}/{k['human_pair'][1]}: {k['human']:.4f}")
    print(f"kappa consensus (OR rule): {k['consensus']:.4f}")
    for row in report.spearman_rows:
        note = "  [known-deviation]" if "known_deviation" in row else ""
        print(f"spearman {row['dataset']}: rho={row['rho']:.1f} "
              f"p={row['p_exact']:.4f}{note}")
    for row in report.effect_rows:
        d = "inf" if row["zero_variance"] else f"{row['d']:.2f}"
        print(f"effect {row['group']}.{row['criterion']}: mean={row['mean']:.3f} "
              f"d={d} ({row['label']})")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        store, report = _report_for_run(args.run_dir, args.corpus)
    except (ReportError, ValueError) as exc:
        print(f"cannot build report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    run_id = store.read_meta().get("run_id", Path(args.run_dir).name) \
        if store.exists() else Path(args.run_dir).name
    out_dir = Path(args.out) / run_id
    formats = tuple(args.formats.split(",")) if args.formats else (
        "markdown", "csv", "chart-json")
    files = report_mod.emit(report, out_dir, formats=formats)
    print(f"wrote {len(files)} file(s) to {out_dir}")
    if args.check_paper:
        mismatches = report_mod.check_paper(report)
        if mismatches:
            print(f"reference check FAILED: {len(mismatches)} mismatch(es)")
            for m in mismatches:
                print(f"  {m['cell']}: expected {m['expected']}, "
                      f"got {m['actual']} (tolerance {m['tolerance']})")
            return EXIT_CHECK_FAILED
        print("reference check passed: all cells within tolerance")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .hitl_service import DEFAULT_EVALUATORS, ServiceError, create_app

    evaluators = DEFAULT_EVALUATORS
    if args.evaluators:
        evaluators = tuple(json.loads(Path(args.evaluators).read_text("utf-8")))
    try:
        app = create_app(args.run_dir, evaluators=evaluators,
                         corpus_root=args.corpus, static_dir=args.static)
    except ServiceError as exc:
        print(f"cannot serve run: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"server failed to start: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if args.fixtures_command == "import-human":
        if not args.run_dir:
            print("fixtures import-human requires --run-dir", file=sys.stderr)
            return EXIT_USAGE
        added = fixture_tools.import_human_scores(args.run_dir)
        print(f"imported {added} published human score(s) into {args.run_dir}")
        return EXIT_OK
    if args.fixtures_command != "import-paper":
        print("unknown fixtures subcommand", file=sys.stderr)
        return EXIT_USAGE
    if not args.dest:
        print("fixtures import-paper requires --dest", file=sys.stderr)
        return EXIT_USAGE
    dest = Path(args.dest)
    corpus = fixture_tools.write_fixture_corpus(dest / "corpus")
    transcripts = dest / "transcripts.jsonl"
    transcripts.unlink(missing_ok=True)
    fixture_tools.build_replay_transcripts(corpus, transcripts)
    config_path = fixture_tools.write_fixture_config(
        dest / "config.json", corpus, transcripts,
        output_root=dest / "runs")
    run = fixture_tools.import_paper_run(
        dest / "runs" / "paper-fixture", corpus_root=corpus,
        include_human_scores=not args.open_human_cells)
    print(f"corpus:      {corpus}")
    print(f"transcripts: {transcripts}")
    print(f"config:      {config_path}")
    print(f"fixture run: {run.run_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelbench",
        description="Generate UML class diagrams from requirements with LLM "
                    "backends and evaluate them with judge tournaments, rubric "
                    "scoring, and agreement statistics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate candidate diagrams")
    p.add_argument("--config", required=True)
    p.add_argument("--run-id", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("judge", help="run pairwise tournaments or absolute scoring")
    p.add_argument("--config", required=True)
    p.add_argument("--run-id", default=None)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--pairwise", action="store_true")
    group.add_argument("--absolute", metavar="GENERATOR", default=None)
    p.add_argument("--swap-positions", action="store_true",
                   help="judge each pair in both A/B orders; disagreement "
                        "becomes a tie")
    p.set_defaults(func=cmd_judge)

    p = sub.add_parser("stats", help="print agreement statistics for a run")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--corpus", default=None)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="emit tables, CSVs, and chart data")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--corpus", default=None)
    p.add_argument("--out", default="reports")
    p.add_argument("--formats", default=None,
                   help="comma-separated: markdown,csv,chart-json")
    p.add_argument("--check-paper", action="store_true",
                   help="compare against the embedded published reference "
                        "values; nonzero exit on mismatch")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="serve the human evaluation workbench")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--corpus", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--evaluators", default=None,
                   help="JSON file: [{id, token}, ...]")
    p.add_argument("--static", default=None,
                   help="directory of built workbench assets to serve at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("fixtures", help="fixture management")
    p.add_argument("fixtures_command", choices=["import-paper", "import-human"])
    p.add_argument("--dest", default=None,
                   help="destination directory (import-paper)")
    p.add_argument("--run-dir", default=None,
                   help="existing run to receive published human scores "
                        "(import-human)")
    p.add_argument("--open-human-cells", action="store_true",
                   help="import-paper: leave human score cells empty so the "
                        "fixture run can host a live scoring session")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigError, CorpusError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
