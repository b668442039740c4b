"""Recompute agreement statistics from stored run data and emit tables,
CSVs, and chart series.

Every number in an emitted report traces back to stored scores or rank
tables; the report embeds a content fingerprint of those inputs (volatile
timestamps excluded) so emitted files are byte-stable across repeated runs
on the same data. Cells that are known not to reproduce the published
value carry an explicit ``known-deviation`` annotation instead of being
silently reconciled.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import published, stats
from .pipeline import RankTable
from .scoring import RubricScore, build_label_matrix
from .published import CRITERIA, CRITERION_NAMES


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class ChartSeries:
    kind: str  # stacked_score_counts | mean_bars_with_d_line
    criteria: tuple[str, ...]
    series: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, "criteria": list(self.criteria),
                "series": self.series}


@dataclass
class AgreementReport:
    spearman_rows: list[dict]
    kappa: dict
    effect_rows: list[dict]
    midpoint_tests: list[dict]
    score_counts: ChartSeries
    alignment: ChartSeries
    source_hash: str
    generated_at: str = ""

    def to_json(self) -> dict:
        # generated_at deliberately omitted: emitted artifacts must be
        # byte-identical across repeated runs on the same inputs
        return {
            "spearman": self.spearman_rows,
            "kappa": self.kappa,
            "effects": self.effect_rows,
            "midpoint_tests": self.midpoint_tests,
            "charts": {"score_counts": self.score_counts.to_json(),
                       "alignment": self.alignment.to_json()},
            "source_hash": self.source_hash,
        }


def source_fingerprint(rank_tables: list[RankTable],
                       scores: list[RubricScore]) -> str:
    """Content hash of the report inputs, excluding volatile timestamps."""
    ranks = sorted((t.dataset_id, t.judge_id, tuple(sorted(t.ranks.items())),
                    t.provenance) for t in rank_tables)
    cells = sorted((s.rater_id, s.rater_kind, s.dataset_id,
                    tuple(sorted(s.scores.items())), s.calibration)
                   for s in scores)
    payload = json.dumps([ranks, cells], sort_keys=True, default=list)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _dataset_order(present: set[str],
                   dataset_order: list[str] | None) -> list[str]:
    base = list(dataset_order) if dataset_order else list(published.DATASET_ORDER)
    ordered = [d for d in base if d in present]
    ordered.extend(sorted(present - set(ordered)))
    return ordered


# --- per-table computations -----------------------------------------------------

def table_spearman(rank_tables: list[RankTable],
                   dataset_order: list[str] | None = None) -> list[dict]:
    """Per-dataset rank correlation (and exact one-sided p) between two judges."""
    by_dataset: dict[str, dict[str, RankTable]] = {}
    for t in rank_tables:
        by_dataset.setdefault(t.dataset_id, {})[t.judge_id] = t
    rows = []
    for dataset in _dataset_order(set(by_dataset), dataset_order):
        per_judge = by_dataset[dataset]
        if len(per_judge) != 2:
            raise ReportError(f"dataset {dataset!r} needs rank tables from "
                              f"exactly two judges, has {sorted(per_judge)}")
        j1, j2 = sorted(per_judge)
        t1, t2 = per_judge[j1], per_judge[j2]
        generators = sorted(t1.ranks)
        if sorted(t2.ranks) != generators:
            raise ReportError(f"judges ranked different generator sets on {dataset!r}")
        a = [t1.ranks[g] for g in generators]
        b = [t2.ranks[g] for g in generators]
        rho = stats.spearman_rho(a, b)
        p = stats.spearman_exact_p(rho, len(generators))
        row = {"dataset": dataset, "judges": [j1, j2], "rho": round(rho, 10),
               "p_exact": round(p, 10)}
        deviation = published.KNOWN_DEVIATIONS.get(("spearman_rho", dataset))
        if deviation is not None:
            row["known_deviation"] = dict(deviation)
        rows.append(row)
    return rows


def _matrix_for(scores: list[RubricScore], dataset_order: list[str] | None):
    llm = sorted({s.rater_id for s in scores if s.rater_kind == "llm_judge"})
    human = sorted({s.rater_id for s in scores if s.rater_kind == "human"})
    if len(llm) != 2 or len(human) != 2:
        raise ReportError(f"need exactly two raters per group, have "
                          f"llm={llm} human={human}")
    present = {s.dataset_id for s in scores if not s.calibration}
    order = _dataset_order(present, dataset_order)
    matrix = build_label_matrix(scores, llm + human, dataset_order=order)
    return matrix, llm, human


def kappa_report(scores: list[RubricScore],
                 dataset_order: list[str] | None = None) -> dict:
    """Pooled within-group kappas plus the OR-consensus cross-group kappa.

    Also includes a per-criterion breakdown (8 items per column) as an
    extra view; only the pooled values have published reference numbers.
    """
    matrix, llm, human = _matrix_for(scores, dataset_order)
    kappa_llm = stats.cohens_kappa(matrix.column(llm[0]), matrix.column(llm[1]))
    kappa_human = stats.cohens_kappa(matrix.column(human[0]), matrix.column(human[1]))
    consensus = stats.cohens_kappa(matrix.consensus(llm), matrix.consensus(human))

    per_criterion: dict[str, dict] = {}
    for i, crit in enumerate(CRITERIA):
        idx = [j for j, (_, c) in enumerate(matrix.items) if c == crit]
        sub = {r: [matrix.column(r)[j] for j in idx] for r in (*llm, *human)}
        per_criterion[crit] = {
            "llm": stats.cohens_kappa(sub[llm[0]], sub[llm[1]]),
            "human": stats.cohens_kappa(sub[human[0]], sub[human[1]]),
        }
    return {
        "llm_pair": llm, "human_pair": human,
        "llm": kappa_llm, "human": kappa_human, "consensus": consensus,
        "per_criterion": per_criterion,
        "items": len(matrix.items),
    }


def _group_vectors(scores: list[RubricScore], rater_ids: list[str],
                   order: list[str]) -> dict[str, dict[str, list[int]]]:
    cells = {(s.rater_id, s.dataset_id): s for s in scores if not s.calibration}
    vectors: dict[str, dict[str, list[int]]] = {}
    for rater in rater_ids:
        vectors[rater] = {}
        for crit in CRITERIA:
            vec = []
            for ds in order:
                cell = cells.get((rater, ds))
                if cell is None:
                    raise ReportError(f"missing score cell: rater {rater!r}, "
                                      f"dataset {ds!r}")
                vec.append(cell.scores[crit])
            vectors[rater][crit] = vec
    return vectors


def effect_table(scores: list[RubricScore],
                 dataset_order: list[str] | None = None) -> list[dict]:
    """Per-criterion pooled means and effect sizes for both rater groups.

    d is signed first-listed rater minus second (raters ordered
    alphabetically within each group); an infinite d is rendered as the
    string "inf" at emit time.
    """
    _, llm, human = _matrix_for(scores, dataset_order)
    present = {s.dataset_id for s in scores if not s.calibration}
    order = _dataset_order(present, dataset_order)
    rows = []
    for group, raters in (("llm", llm), ("human", human)):
        vectors = _group_vectors(scores, raters, order)
        for crit in CRITERIA:
            first = vectors[raters[0]][crit]
            second = vectors[raters[1]][crit]
            effect = stats.cohens_d(first, second)
            rows.append({
                "group": group, "criterion": crit,
                "criterion_name": CRITERION_NAMES[crit],
                "mean": stats.mean(first + second),
                "d": effect.d, "label": effect.label,
                "zero_variance": effect.undefined_zero_variance,
            })
    return rows


def midpoint_tests(scores: list[RubricScore],
                   dataset_order: list[str] | None = None,
                   mu0: float = 3.0) -> list[dict]:
    """Signed-rank test of each group's pooled criterion scores against mu0."""
    _, llm, human = _matrix_for(scores, dataset_order)
    present = {s.dataset_id for s in scores if not s.calibration}
    order = _dataset_order(present, dataset_order)
    rows = []
    for group, raters in (("llm", llm), ("human", human)):
        vectors = _group_vectors(scores, raters, order)
        for crit in CRITERIA:
            pooled = vectors[raters[0]][crit] + vectors[raters[1]][crit]
            r = stats.wilcoxon_signed_rank(pooled, mu0=mu0)
            rows.append({"group": group, "criterion": crit,
                         "criterion_name": CRITERION_NAMES[crit],
                         "n": r.n, "statistic": r.statistic,
                         "p_greater": r.p_greater, "p_two_sided": r.p_value,
                         "method": r.method})
    return rows


def score_count_series(scores: list[RubricScore],
                       dataset_order: list[str] | None = None) -> ChartSeries:
    """Stacked per-rater counts of each score value 1..5 per criterion."""
    _, llm, human = _matrix_for(scores, dataset_order)
    present = {s.dataset_id for s in scores if not s.calibration}
    order = _dataset_order(present, dataset_order)
    series: dict[str, dict] = {}
    for group, raters in (("llm", llm), ("human", human)):
        vectors = _group_vectors(scores, raters, order)
        for rater in raters:
            per_crit = {}
            for crit in CRITERIA:
                counts = {str(v): 0 for v in range(1, 6)}
                for value in vectors[rater][crit]:
                    counts[str(value)] += 1
                per_crit[crit] = counts
            series[rater] = {"group": group, "counts": per_crit}
    return ChartSeries(kind="stacked_score_counts", criteria=CRITERIA,
                       series=series)


def alignment_series(effect_rows: list[dict]) -> ChartSeries:
    """Mean bars per group plus the averaged |d| line across groups.

    Infinite effect sizes are excluded from the average and flagged, since
    averaging with infinity is undefined.
    """
    by_key = {(r["group"], r["criterion"]): r for r in effect_rows}
    llm_means, human_means, d_line = [], [], []
    excluded: dict[str, str] = {}
    for crit in CRITERIA:
        llm_row = by_key[("llm", crit)]
        human_row = by_key[("human", crit)]
        llm_means.append(llm_row["mean"])
        human_means.append(human_row["mean"])
        ds = []
        for row in (llm_row, human_row):
            if math.isinf(row["d"]):
                excluded[crit] = f"{row['group']} d infinite (zero variance)"
            else:
                ds.append(abs(row["d"]))
        d_line.append(sum(ds) / len(ds) if ds else None)
    return ChartSeries(kind="mean_bars_with_d_line", criteria=CRITERIA,
                       series={"llm_means": llm_means,
                               "human_means": human_means,
                               "d_line": d_line, "excluded": excluded})


def build_report(rank_tables: list[RankTable], scores: list[RubricScore],
                 dataset_order: list[str] | None = None) -> AgreementReport:
    effects = effect_table(scores, dataset_order)
    return AgreementReport(
        spearman_rows=table_spearman(rank_tables, dataset_order),
        kappa=kappa_report(scores, dataset_order),
        effect_rows=effects,
        midpoint_tests=midpoint_tests(scores, dataset_order),
        score_counts=score_count_series(scores, dataset_order),
        alignment=alignment_series(effects),
        source_hash=source_fingerprint(rank_tables, scores),
        generated_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    )


# --- emission --------------------------------------------------------------------

def _fmt_d(d: float) -> str:
    if math.isinf(d):
        return "inf"
    return f"{d:.2f}"


def _markdown(report: AgreementReport) -> str:
    lines = ["# Agreement report", "",
             f"Input fingerprint: `{report.source_hash}`", ""]
    lines.append("## Rank correlation between judges")
    lines.append("")
    lines.append("| Dataset | rho | exact p (one-sided) | note |")
    lines.append("|---|---|---|---|")
    for row in report.spearman_rows:
        note = ""
        if "known_deviation" in row:
            kd = row["known_deviation"]
            note = (f"known-deviation: published {kd['published']}, "
                    f"recomputed {kd['recomputed']}")
        lines.append(f"| {row['dataset']} | {row['rho']:.1f} "
                     f"| {row['p_exact']:.4f} | {note} |")
    lines.append("")
    k = report.kappa
    lines.append("## Chance-corrected agreement (binary acceptability)")
    lines.append("")
    lines.append(f"- kappa({k['llm_pair'][0]}, {k['llm_pair'][1]}) = {k['llm']:.4f}")
    lines.append(f"- kappa({k['human_pair'][0]}, {k['human_pair'][1]}) = {k['human']:.4f}")
    lines.append(f"- kappa(LLM consensus, human consensus) = {k['consensus']:.4f}"
                 "  (OR rule per group)")
    lines.append("")
    lines.append("Per-criterion view (8 items each; no published reference):")
    lines.append("")
    lines.append("| Criterion | LLM pair | Human pair |")
    lines.append("|---|---|---|")

    def fmt_kappa(v) -> str:
        return "undefined" if v is None else f"{v:.3f}"

    for crit, pair in k["per_criterion"].items():
        lines.append(f"| {CRITERION_NAMES[crit]} | {fmt_kappa(pair['llm'])} "
                     f"| {fmt_kappa(pair['human'])} |")
    lines.append("")
    lines.append("## Criterion means and effect sizes")
    lines.append("")
    lines.append("| Group | Criterion | Mean | d | Effect |")
    lines.append("|---|---|---|---|---|")
    for row in report.effect_rows:
        lines.append(f"| {row['group']} | {row['criterion_name']} "
                     f"| {row['mean']:.3f} | {_fmt_d(row['d'])} | {row['label']} |")
    lines.append("")
    lines.append("## Location tests against the rubric midpoint (3)")
    lines.append("")
    lines.append("| Group | Criterion | n | W+ | p (greater) | p (two-sided) | method |")
    lines.append("|---|---|---|---|---|---|---|")
    for row in report.midpoint_tests:
        lines.append(f"| {row['group']} | {row['criterion_name']} | {row['n']} "
                     f"| {row['statistic']:.1f} | {row['p_greater']:.4g} "
                     f"| {row['p_two_sided']:.4g} | {row['method']} |")
    lines.append("")
    return "\n".join(lines)


def _csv_bytes(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def emit(report: AgreementReport, out_dir: str | Path,
         formats: tuple[str, ...] = ("markdown", "csv", "chart-json")) -> list[Path]:
    """Write report artifacts; two emits of the same report are byte-identical."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def write(name: str, text: str) -> None:
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)

    write("report.json", json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    if "markdown" in formats:
        write("tables.md", _markdown(report))
    if "csv" in formats:
        write("spearman.csv", _csv_bytes(
            ["dataset", "rho", "p_exact", "known_deviation"],
            [[r["dataset"], f"{r['rho']:.1f}", f"{r['p_exact']:.6f}",
              "yes" if "known_deviation" in r else ""]
             for r in report.spearman_rows]))
        write("effects.csv", _csv_bytes(
            ["group", "criterion", "mean", "d", "label"],
            [[r["group"], r["criterion_name"], f"{r['mean']:.3f}",
              _fmt_d(r["d"]), r["label"]] for r in report.effect_rows]))
        write("kappa.csv", _csv_bytes(
            ["pair", "kappa"],
            [["llm", f"{report.kappa['llm']:.6f}"],
             ["human", f"{report.kappa['human']:.6f}"],
             ["consensus", f"{report.kappa['consensus']:.6f}"]]))
    if "chart-json" in formats:
        charts = {"score_counts": report.score_counts.to_json(),
                  "alignment": report.alignment.to_json()}
        write("charts.json", json.dumps(charts, indent=2, sort_keys=True) + "\n")
    return written


# --- reference-value checking ------------------------------------------------------

def check_paper(report: AgreementReport) -> list[dict]:
    """Compare recomputed values against the embedded published references.

    Returns a list of mismatch records (empty means everything within
    tolerance). Cells covered by a ``known-deviation`` annotation are
    checked for the annotation's presence rather than for equality.
    """
    mismatches: list[dict] = []
    tol = published.TOLERANCES

    def fail(cell: str, expected, actual, tolerance) -> None:
        mismatches.append({"cell": cell, "expected": expected,
                           "actual": actual, "tolerance": tolerance})

    for row in report.spearman_rows:
        dataset = row["dataset"]
        ref = published.SPEARMAN.get(dataset)
        if ref is None:
            continue
        if ("spearman_rho", dataset) in published.KNOWN_DEVIATIONS:
            deviation = published.KNOWN_DEVIATIONS[("spearman_rho", dataset)]
            if "known_deviation" not in row:
                fail(f"spearman[{dataset}].annotation", "known-deviation note",
                     "missing", None)
            elif abs(row["rho"] - deviation["recomputed"]) > 1e-9:
                fail(f"spearman[{dataset}].rho(recomputed)",
                     deviation["recomputed"], row["rho"], 1e-9)
            continue
        if abs(row["rho"] - ref["rho"]) > 1e-9:
            fail(f"spearman[{dataset}].rho", ref["rho"], row["rho"], 1e-9)
        if abs(round(row["p_exact"], 1) - ref["p"]) > 1e-9:
            fail(f"spearman[{dataset}].p", ref["p"], round(row["p_exact"], 1), 0.05)

    for key, tol_key in (("llm", "kappa_llm"), ("human", "kappa_human"),
                         ("consensus", "kappa_consensus")):
        expected = published.KAPPA[key]
        actual = report.kappa[key]
        if actual is None or abs(actual - expected) > tol[tol_key]:
            fail(f"kappa[{key}]", expected, actual, tol[tol_key])

    by_key = {(r["group"], r["criterion"]): r for r in report.effect_rows}
    for group, per_crit in published.EFFECT_TABLE.items():
        for crit, ref in per_crit.items():
            row = by_key.get((group, crit))
            if row is None:
                fail(f"effect[{group}.{crit}]", ref, "missing", None)
                continue
            if abs(row["mean"] - ref["mean"]) > tol["mean"]:
                fail(f"effect[{group}.{crit}].mean", ref["mean"], row["mean"],
                     tol["mean"])
            if ref["d"] == "inf":
                if not math.isinf(row["d"]) or not row["zero_variance"]:
                    fail(f"effect[{group}.{crit}].d", "inf", row["d"], None)
            elif math.isinf(row["d"]) or abs(row["d"] - ref["d"]) > tol["d"]:
                fail(f"effect[{group}.{crit}].d", ref["d"], row["d"], tol["d"])
            if row["label"] != ref["label"]:
                fail(f"effect[{group}.{crit}].label", ref["label"], row["label"],
                     None)
    return mismatches
