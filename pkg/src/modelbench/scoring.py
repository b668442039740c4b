"""Rubric scores, binarization, and OR-rule consensus labels.

A :class:`RubricScore` is one rater's 1-5 assessment of one diagram on the
five criteria C1..C5 (completeness, correctness, adherence to standards,
comprehensibility, terminological alignment). Agreement statistics operate
on binary acceptable/unacceptable labels derived here.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Iterable, Sequence

from .published import CRITERIA

ACCEPTABLE = "acceptable"
UNACCEPTABLE = "unacceptable"

RATER_KINDS = ("llm_judge", "human")

_store_lock = threading.Lock()


class ScoringError(ValueError):
    pass


@dataclass(frozen=True)
class RubricScore:
    """One rater's criterion scores for one dataset's diagram."""

    rater_id: str
    rater_kind: str
    dataset_id: str
    scores: dict[str, int]
    justification: str = ""
    created_at: str = ""
    calibration: bool = False

    def __post_init__(self):
        if self.rater_kind not in RATER_KINDS:
            raise ScoringError(f"unknown rater kind {self.rater_kind!r}")
        missing = [c for c in CRITERIA if c not in self.scores]
        if missing:
            raise ScoringError(f"missing criteria {missing} for {self.rater_id}/{self.dataset_id}")
        for crit, value in self.scores.items():
            if crit not in CRITERIA:
                raise ScoringError(f"unknown criterion {crit!r}")
            if not isinstance(value, int) or not 1 <= value <= 5:
                raise ScoringError(f"score {crit}={value!r} outside 1..5")

    def needs_justification(self) -> bool:
        """True when any criterion scored 3 or lower."""
        return any(v <= 3 for v in self.scores.values())

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "RubricScore":
        return cls(
            rater_id=obj["rater_id"],
            rater_kind=obj["rater_kind"],
            dataset_id=obj["dataset_id"],
            scores={c: int(v) for c, v in obj["scores"].items()},
            justification=obj.get("justification", ""),
            created_at=obj.get("created_at", ""),
            calibration=bool(obj.get("calibration", False)),
        )


@dataclass(frozen=True)
class LabelMatrix:
    """Aligned binary label columns over a fixed (dataset, criterion) item order."""

    items: tuple[tuple[str, str], ...]
    columns: dict[str, tuple[str, ...]]

    def column(self, rater_id: str) -> tuple[str, ...]:
        return self.columns[rater_id]

    def consensus(self, rater_ids: Sequence[str]) -> tuple[str, ...]:
        """OR-rule consensus column over the given raters."""
        cols = [self.columns[r] for r in rater_ids]
        return tuple(or_consensus(row) for row in zip(*cols))


def binarize(score: int) -> str:
    """Map a 1-5 rubric score to acceptable (4-5) or unacceptable (1-3)."""
    if not isinstance(score, (int,)) or not 1 <= score <= 5:
        raise ScoringError(f"score {score!r} outside 1..5")
    return ACCEPTABLE if score >= 4 else UNACCEPTABLE


def or_consensus(labels: Iterable[str]) -> str:
    """Acceptable if any input label is acceptable; unacceptable only if all are."""
    labels = list(labels)
    if not labels:
        raise ScoringError("consensus of empty label list")
    for lab in labels:
        if lab not in (ACCEPTABLE, UNACCEPTABLE):
            raise ScoringError(f"unknown label {lab!r}")
    return ACCEPTABLE if ACCEPTABLE in labels else UNACCEPTABLE


def build_label_matrix(scores: Iterable[RubricScore], rater_ids: Sequence[str],
                       dataset_order: Sequence[str] | None = None) -> LabelMatrix:
    """Binarize scores into aligned per-rater label columns.

    Item order is dataset_order x C1..C5; when no order is given, datasets
    are taken in order of first appearance in the score stream. Calibration
    scores are excluded. A missing (rater, dataset) cell is an error.
    """
    by_cell: dict[tuple[str, str], RubricScore] = {}
    seen_order: list[str] = []
    for s in scores:
        if s.calibration:
            continue
        if s.dataset_id not in seen_order:
            seen_order.append(s.dataset_id)
        by_cell[(s.rater_id, s.dataset_id)] = s
    datasets = list(dataset_order) if dataset_order is not None else seen_order
    if not datasets:
        raise ScoringError("no scores to build a label matrix from")

    items = tuple((ds, crit) for ds in datasets for crit in CRITERIA)
    columns: dict[str, tuple[str, ...]] = {}
    for rater in rater_ids:
        col: list[str] = []
        for ds in datasets:
            cell = by_cell.get((rater, ds))
            if cell is None:
                raise ScoringError(f"missing score cell: rater {rater!r}, dataset {ds!r}")
            for crit in CRITERIA:
                col.append(binarize(cell.scores[crit]))
        columns[rater] = tuple(col)
    return LabelMatrix(items=items, columns=columns)


def total_score(score: RubricScore) -> int:
    """Sum of the five criterion scores (5..25)."""
    return sum(score.scores[c] for c in CRITERIA)


# --- jsonl score store -------------------------------------------------------

def load_scores(path: str | Path) -> list[RubricScore]:
    path = Path(path)
    if not path.exists():
        return []
    out = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(RubricScore.from_json(json.loads(line)))
    return out


def append_score(path: str | Path, score: RubricScore) -> None:
    path = Path(path)
    with _store_lock:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(score.to_json(), sort_keys=True) + "\n")
