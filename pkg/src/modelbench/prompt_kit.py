"""Prompt templates and structured parsing of model responses.

Templates live as data files with ``{{slot}}`` markers so the exact wording
ships as a swappable fixture rather than a code constant. Response parsing
is deliberately lenient: a pairwise verdict that does not match the
mandated format maps to ``tie_or_unparseable`` (which downstream routes to
human tie-breaking) instead of raising.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .corpus import RequirementsDoc, requirements_text

TEMPLATE_IDS = ("generation", "pairwise_judge", "absolute_scorer")

_SLOT_RE = re.compile(r"\{\{([a-z_]+)\}\}")


class PromptError(ValueError):
    pass


class ExtractionError(ValueError):
    """No PlantUML block could be extracted from a response."""


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    text: str

    def slots(self) -> set[str]:
        return set(_SLOT_RE.findall(self.text))

    def render(self, **values: str) -> str:
        missing = self.slots() - set(values)
        if missing:
            raise PromptError(f"template {self.id}: unfilled slots {sorted(missing)}")
        out = self.text
        for name, value in values.items():
            out = out.replace("{{" + name + "}}", value)
        return out


@lru_cache(maxsize=None)
def load_template(template_id: str) -> PromptTemplate:
    if template_id not in TEMPLATE_IDS:
        raise PromptError(f"unknown template {template_id!r}")
    text = resources.files("modelbench").joinpath(
        f"data/templates/{template_id}.txt").read_text("utf-8")
    return PromptTemplate(id=template_id, text=text)


def render_generation_prompt(doc: RequirementsDoc) -> str:
    """Diagram-generation prompt with the requirements embedded verbatim."""
    if not doc.items:
        raise PromptError("cannot render a generation prompt for an empty document")
    return load_template("generation").render(requirements=requirements_text(doc))


def render_pairwise_prompt(doc: RequirementsDoc, plantuml_a: str,
                           plantuml_b: str) -> str:
    """Judge prompt comparing candidate A against candidate B."""
    if not plantuml_a.strip() or not plantuml_b.strip():
        raise PromptError("both candidate diagrams must be non-empty")
    return load_template("pairwise_judge").render(
        requirements=requirements_text(doc),
        candidate_a=plantuml_a,
        candidate_b=plantuml_b,
    )


def render_scoring_prompt(doc: RequirementsDoc, plantuml: str) -> str:
    """Absolute 1-5 rubric scoring prompt for a single diagram."""
    if not plantuml.strip():
        raise PromptError("candidate diagram must be non-empty")
    return load_template("absolute_scorer").render(
        requirements=requirements_text(doc),
        plantuml=plantuml,
    )


# --- response parsing ---------------------------------------------------------

_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


@dataclass(frozen=True)
class ExtractedBlock:
    text: str
    warnings: tuple[str, ...] = ()


def extract_plantuml_block(response: str) -> ExtractedBlock:
    """Pull the PlantUML source out of a model response.

    Preference order: first fenced code block containing ``@startuml``;
    otherwise the raw ``@startuml``..``@enduml`` span with an "unfenced"
    warning. More than one fenced block adds a "multiple-blocks" warning.
    Raises ExtractionError when no ``@startuml`` exists anywhere.
    """
    warnings: list[str] = []
    fences = _FENCE_RE.findall(response)
    if len(fences) > 1:
        warnings.append("multiple-blocks")
    for body in fences:
        if "@startuml" in body:
            return ExtractedBlock(text=body.strip(), warnings=tuple(warnings))
    start = response.find("@startuml")
    if start < 0:
        raise ExtractionError("no @startuml found in response")
    warnings.append("unfenced")
    end = response.find("@enduml", start)
    if end >= 0:
        span = response[start:end + len("@enduml")]
    else:
        span = response[start:]
    return ExtractedBlock(text=span.strip(), warnings=tuple(warnings))


@dataclass(frozen=True)
class PairwiseVerdict:
    winner: str  # "A" | "B" | "tie_or_unparseable"
    justification: str = ""
    criterion_scores: dict[int, dict[str, int]] = field(default_factory=dict)

    @property
    def decided(self) -> bool:
        return self.winner in ("A", "B")


_WINNER_RE = re.compile(r"winner\s*:?\s*\**\s*([ab])\b(?!\s*\|)", re.IGNORECASE)
_JUSTIFICATION_RE = re.compile(r"justification\s*:\s*(.*)", re.IGNORECASE | re.DOTALL)
# "3: 4/5" style criterion lines and "criterion 3: A=4, B=5" prose
_PAIR_SCORE_LINE_RE = re.compile(r"^\s*([1-5])\s*[).:\-]\s*([1-5])\s*/\s*([1-5])\s*$",
                                 re.MULTILINE)
_PAIR_SCORE_PROSE_RE = re.compile(
    r"(?:criterion\s*)?([1-5])\s*[:)]?\s*A\s*=\s*([1-5])\s*[,/;]?\s*B\s*=\s*([1-5])",
    re.IGNORECASE)


def parse_pairwise_verdict(response: str) -> PairwiseVerdict:
    """Extract winner, justification, and any per-criterion score pairs.

    Anything that does not state a winner in the mandated format becomes
    ``tie_or_unparseable``; score harvesting is best-effort and never
    affects the winner.
    """
    m = _WINNER_RE.search(response)
    winner = m.group(1).upper() if m else "tie_or_unparseable"
    jm = _JUSTIFICATION_RE.search(response)
    justification = jm.group(1).strip() if jm else response.strip()
    scores: dict[int, dict[str, int]] = {}
    for crit, a, b in _PAIR_SCORE_LINE_RE.findall(response):
        scores[int(crit)] = {"a": int(a), "b": int(b)}
    for crit, a, b in _PAIR_SCORE_PROSE_RE.findall(response):
        scores.setdefault(int(crit), {"a": int(a), "b": int(b)})
    return PairwiseVerdict(winner=winner, justification=justification,
                           criterion_scores=scores)


class ScoreParseError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


_CRITERION_NAME_PATTERNS = (
    (1, re.compile(r"\b(completeness|coverage)\b", re.IGNORECASE)),
    (2, re.compile(r"\b(correctness|accuracy|logical consistency)\b", re.IGNORECASE)),
    (3, re.compile(r"\b(standards|adherence)\b", re.IGNORECASE)),
    (4, re.compile(r"\b(understandability|comprehensibility|clarity)\b", re.IGNORECASE)),
    (5, re.compile(r"\b(terminolog\w*)\b", re.IGNORECASE)),
)
_NUMBERED_LINE_RE = re.compile(r"^\s*([1-9])\s*[).:\-]\s*(.*)$")
_TRAILING_SCORE_RE = re.compile(r"(?:score\s*)?[:\-=]?\s*(\d+)\s*(?:/\s*5)?\s*$")
_LONE_SCORE_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*5)?\s*$")


def parse_absolute_scores(response: str) -> dict[str, int]:
    """Parse five criterion scores from a grading response.

    Accepts numbered lines ("1) 4", "2. Accuracy: 5") and named lines
    ("Terminology Alignment: 4"). Raises ScoreParseError with code
    "incomplete-scores" when fewer than five distinct criteria are found
    and "out-of-range" when a found score is outside 1..5.
    """
    found: dict[int, int] = {}

    def record(criterion: int, value: int) -> None:
        if not 1 <= value <= 5:
            raise ScoreParseError(
                "out-of-range", f"criterion {criterion} score {value} outside 1..5")
        found.setdefault(criterion, value)

    for line in response.splitlines():
        if not line.strip():
            continue
        m = _NUMBERED_LINE_RE.match(line)
        if m and 1 <= int(m.group(1)) <= 5:
            crit = int(m.group(1))
            rest = m.group(2).strip()
            lone = _LONE_SCORE_RE.match(rest)
            if lone:
                record(crit, int(lone.group(1)))
                continue
            trail = _TRAILING_SCORE_RE.search(rest)
            if trail:
                record(crit, int(trail.group(1)))
                continue
            continue
        for crit, name_re in _CRITERION_NAME_PATTERNS:
            if name_re.search(line):
                trail = _TRAILING_SCORE_RE.search(line)
                if trail:
                    record(crit, int(trail.group(1)))
                break
    if len(found) < 5:
        missing = sorted(set(range(1, 6)) - set(found))
        raise ScoreParseError(
            "incomplete-scores",
            f"found scores for {sorted(found)} but not criteria {missing}")
    return {f"C{k}": found[k] for k in range(1, 6)}
