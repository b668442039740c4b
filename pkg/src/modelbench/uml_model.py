"""PlantUML class-diagram subset: parse, validate, diff, emit, analyze.

The grammar covers exactly what the generation prompt mandates: packages,
class/abstract class/interface/enum declarations with typed members, and
the five relation arrows (association ``-->``, generalization ``--|>``,
realization ``..|>``, aggregation ``o--``, composition ``*--``) with
optional quoted multiplicities and labels. Styling, notes, and comments
are lexed and discarded. Parsing is line-based with error recovery: a bad
line produces a diagnostic and is skipped, never aborting the parse.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from typing import Iterable

CLASSIFIER_KINDS = ("class", "abstract_class", "interface", "enum")
RELATION_KINDS = ("association", "generalization", "realization",
                  "aggregation", "composition")
VISIBILITIES = ("+", "#", "-")

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_MULT_RE = re.compile(r"^(?:\d+|\*|\d+\.\.(?:\d+|\*))$")
_PLACEHOLDER_RE = re.compile(r"^<\s*[A-Za-z_][A-Za-z0-9_]*\s*>$")


class UmlError(ValueError):
    """Raised for contract violations (e.g. emitting an invalid model)."""


# --- model types -------------------------------------------------------------

@dataclass(frozen=True)
class Param:
    type: str
    name: str | None = None


@dataclass(frozen=True)
class Member:
    name: str
    member_kind: str  # attribute | method
    type: str = ""
    visibility: str = "+"
    params: tuple[Param, ...] = ()

    def signature(self) -> str:
        """Canonical one-line form, as used in emitted text and summaries."""
        if self.member_kind == "method":
            args = ", ".join(
                f"{p.name} : {p.type}" if p.name else p.type for p in self.params
            )
            head = f"{self.visibility}{self.name}({args})"
            return f"{head} : {self.type}" if self.type else head
        if not self.type:
            return self.name
        return f"{self.visibility}{self.name} : {self.type}"


@dataclass
class Classifier:
    name: str
    kind: str = "class"
    members: list[Member] = field(default_factory=list)
    owning_package: str | None = None
    auto_declared: bool = False


@dataclass(frozen=True)
class Relation:
    source: str
    target: str
    kind: str
    source_mult: str | None = None
    target_mult: str | None = None
    label: str | None = None

    def key(self) -> tuple:
        return (self.source, self.target, self.kind, self.source_mult or "",
                self.target_mult or "", self.label or "")


@dataclass(frozen=True)
class Package:
    name: str
    classifier_names: tuple[str, ...]


@dataclass
class ClassModel:
    classifiers: list[Classifier] = field(default_factory=list)
    relations: list[Relation] = field(default_factory=list)

    @property
    def packages(self) -> list[Package]:
        """Packages derived from classifier ownership, in first-seen order."""
        order: list[str] = []
        groups: dict[str, list[str]] = {}
        for c in self.classifiers:
            if c.owning_package is None:
                continue
            if c.owning_package not in groups:
                groups[c.owning_package] = []
                order.append(c.owning_package)
            groups[c.owning_package].append(c.name)
        return [Package(name, tuple(groups[name])) for name in order]

    def classifier(self, name: str) -> Classifier | None:
        for c in self.classifiers:
            if c.name == name:
                return c
        return None

    def structural_key(self) -> tuple:
        """Order-insensitive canonical form used for structural equality."""
        cls = tuple(sorted(
            (c.name, c.kind, c.owning_package or "",
             tuple(m.signature() for m in c.members))
            for c in self.classifiers
        ))
        rels = tuple(sorted(Counter(r.key() for r in self.relations).items()))
        return (cls, rels)

    def structurally_equal(self, other: "ClassModel") -> bool:
        return self.structural_key() == other.structural_key()


@dataclass(frozen=True)
class Violation:
    code: str
    severity: str  # error | warning
    line: int
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def errors(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "error"]

    @property
    def warnings(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def add(self, code: str, severity: str, line: int, message: str) -> None:
        self.violations.append(Violation(code, severity, line, message))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def to_json(self) -> list[dict]:
        return [vars(v) for v in self.violations]

    @classmethod
    def from_json(cls, items: list[dict]) -> "ValidationReport":
        rep = cls()
        for it in items:
            rep.add(it["code"], it["severity"], it["line"], it["message"])
        return rep


@dataclass(frozen=True)
class RenderNode:
    id: str
    kind: str
    label: str
    package: str | None
    members: tuple[str, ...]


@dataclass(frozen=True)
class RenderEdge:
    source: str
    target: str
    kind: str
    source_mult: str | None
    target_mult: str | None
    label: str | None


@dataclass(frozen=True)
class RenderGraph:
    nodes: tuple[RenderNode, ...]
    edges: tuple[RenderEdge, ...]

    def to_json(self) -> dict:
        return {
            "nodes": [vars(n) | {"members": list(n.members)} for n in self.nodes],
            "edges": [vars(e) for e in self.edges],
        }


# --- parsing ------------------------------------------------------------------

# (pattern, kind, endpoints_reversed); longest/most specific first
_ARROWS = (
    (r"<\|\.+", "realization", True),
    (r"<\|-+", "generalization", True),
    (r"\.+\|>", "realization", False),
    (r"-+\|>", "generalization", False),
    (r"o-+", "aggregation", False),
    (r"-+o", "aggregation", True),
    (r"\*-+", "composition", False),
    (r"-+\*", "composition", True),
    (r"<-+", "association", True),
    (r"-+>", "association", False),
    (r"\.+>", "association", False),
    (r"-+", "association", False),
)
_ARROW_RE = "|".join(f"(?P<a{i}>{pat})" for i, pat in
                     enumerate(p for p, _, _ in _ARROWS))

_RELATION_RE = re.compile(
    rf"^(?P<src>{_IDENT})\s*"
    rf'(?:"(?P<smult>[^"]*)"\s*)?'
    rf"(?P<arrow>{_ARROW_RE})\s*"
    rf'(?:"(?P<tmult>[^"]*)"\s*)?'
    rf"(?P<tgt>{_IDENT})\s*"
    rf"(?::\s*(?P<label>.*?))?\s*$"
)

_PACKAGE_RE = re.compile(
    rf'^package\s+(?:"(?P<qname>[^"]+)"|(?P<name>{_IDENT}))\s*(?P<brace>\{{)?\s*$'
)

_CLASSIFIER_RE = re.compile(
    rf'^(?P<kw>abstract\s+class|abstract|class|interface|enum)\s+'
    rf'(?:"(?P<qname>[^"]+)"|(?P<name>{_IDENT}))\s*'
    rf"(?P<brace>\{{\s*\}}?)?\s*$"
)

_ATTR_RE = re.compile(
    rf"^(?P<vis>[+#-])?\s*(?P<name>{_IDENT})\s*:\s*(?P<type>[^({{]+?)\s*$"
)
_METHOD_RE = re.compile(
    rf"^(?P<vis>[+#-])?\s*(?P<name>{_IDENT})\s*\((?P<params>[^)]*)\)"
    rf"\s*(?::\s*(?P<type>.+?))?\s*$"
)
_CSTYLE_METHOD_RE = re.compile(
    rf"^(?P<type>{_IDENT}(?:<[^>]*>)?(?:\[\])?)\s+(?P<name>{_IDENT})"
    rf"\s*\((?P<params>[^)]*)\)\s*$"
)
_CSTYLE_ATTR_RE = re.compile(
    rf"^(?P<type>{_IDENT}(?:<[^>]*>)?(?:\[\])?)\s+(?P<name>{_IDENT})\s*$"
)
_BARE_RE = re.compile(rf"^(?P<name>{_IDENT})\s*,?\s*$")
_PLACEHOLDER_ATTR_RE = re.compile(
    rf"^(?P<vis>[+#-])?\s*(?P<name>{_IDENT})\s*:\s*(?P<type><[^>]*>)\s*$"
)

_DISCARD_PREFIXES = (
    "skinparam", "hide ", "show ", "title", "caption", "scale",
    "left to right direction", "top to bottom direction", "header",
    "footer", "!",
)
_BODY_SEPARATOR_RE = re.compile(r"^(--+|\.\.+|==+|__+)$")


def _split_params(raw: str) -> tuple[Param, ...]:
    """Split a parameter list on commas not nested inside angle brackets."""
    raw = raw.strip()
    if not raw:
        return ()
    parts: list[str] = []
    depth = 0
    cur = ""
    for ch in raw:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth = max(0, depth - 1)
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    out: list[Param] = []
    for part in parts:
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            pname, ptype = part.split(":", 1)
            out.append(Param(type=ptype.strip(), name=pname.strip() or None))
        else:
            tokens = part.split()
            if len(tokens) >= 2:
                out.append(Param(type=" ".join(tokens[:-1]), name=tokens[-1]))
            else:
                out.append(Param(type=tokens[0]))
    return tuple(out)


def _parse_member(line: str, kind: str) -> Member | None:
    """Parse one classifier body line; None means unparseable."""
    stripped = re.sub(r"\{(?:static|abstract|field|method)\}", "", line).strip()
    if not stripped:
        return None
    m = _METHOD_RE.match(stripped)
    if m:
        return Member(
            name=m.group("name"),
            member_kind="method",
            type=(m.group("type") or "").strip(),
            visibility=m.group("vis") or "+",
            params=_split_params(m.group("params")),
        )
    m = _PLACEHOLDER_ATTR_RE.match(stripped) or _ATTR_RE.match(stripped)
    if m:
        return Member(
            name=m.group("name"),
            member_kind="attribute",
            type=m.group("type").strip(),
            visibility=m.group("vis") or "+",
        )
    m = _CSTYLE_METHOD_RE.match(stripped)
    if m:
        return Member(
            name=m.group("name"),
            member_kind="method",
            type=m.group("type").strip(),
            visibility="+",
            params=_split_params(m.group("params")),
        )
    m = _CSTYLE_ATTR_RE.match(stripped)
    if m and kind != "enum":
        return Member(
            name=m.group("name"),
            member_kind="attribute",
            type=m.group("type").strip(),
            visibility="+",
        )
    m = _BARE_RE.match(stripped)
    if m:
        return Member(name=m.group("name"), member_kind="attribute", type="")
    return None


class _ParserState:
    def __init__(self) -> None:
        self.model = ClassModel()
        self.report = ValidationReport()
        self.registry: dict[str, Classifier] = {}
        self.package_stack: list[str] = []
        self.open_classifier: Classifier | None = None
        self.relation_scopes: dict[str, str | None] = {}

    def current_package(self) -> str | None:
        return self.package_stack[-1] if self.package_stack else None

    def declare(self, name: str, kind: str, line: int,
                auto: bool = False) -> Classifier:
        existing = self.registry.get(name)
        if existing is None:
            c = Classifier(name=name, kind=kind,
                           owning_package=self.current_package(),
                           auto_declared=auto)
            self.registry[name] = c
            self.model.classifiers.append(c)
            return c
        # merge a re-declaration into the existing classifier
        existing.auto_declared = existing.auto_declared and auto
        if existing.kind == "class" and kind != "class":
            existing.kind = kind
        elif kind != "class" and kind != existing.kind:
            self.report.add("kind-conflict", "warning", line,
                            f"{name} re-declared as {kind}, keeping {existing.kind}")
        if existing.owning_package is None and self.current_package() is not None:
            existing.owning_package = self.current_package()
        return existing


def parse_plantuml(text: str) -> tuple[ClassModel, ValidationReport]:
    """Parse PlantUML text into a class model plus parse diagnostics.

    Never raises on malformed input: unparseable lines are reported and
    skipped. Classifiers referenced only by relations are auto-declared as
    plain classes with a warning.
    """
    st = _ParserState()
    lines = text.splitlines()

    start_idx = end_idx = None
    for i, line in enumerate(lines):
        s = line.strip()
        if start_idx is None and s.startswith("@startuml"):
            start_idx = i
        elif start_idx is not None and s.startswith("@enduml"):
            end_idx = i
            break
    if start_idx is None:
        st.report.add("missing-startuml", "error", 1, "no @startuml marker found")
    if start_idx is not None and end_idx is None:
        st.report.add("missing-enduml", "error", len(lines),
                      "no @enduml marker found")
    if end_idx is not None:
        trailing = [l for l in lines[end_idx + 1:] if l.strip()]
        if trailing:
            st.report.add("trailing-content", "warning", end_idx + 2,
                          f"{len(trailing)} non-empty line(s) after @enduml")

    body_start = (start_idx + 1) if start_idx is not None else 0
    body_end = end_idx if end_idx is not None else len(lines)

    in_block_comment = False
    in_note = False
    in_legend = False
    for idx in range(body_start, body_end):
        lineno = idx + 1
        raw = lines[idx]
        line = raw.strip()

        if in_block_comment:
            if "'/" in line:
                in_block_comment = False
            continue
        if line.startswith("/'"):
            if "'/" not in line[2:]:
                in_block_comment = True
            continue
        if in_note:
            if line == "end note":
                in_note = False
            continue
        if in_legend:
            if line == "end legend":
                in_legend = False
            continue
        if not line or line.startswith("'"):
            continue
        if line.startswith("note"):
            if ":" not in line:
                in_note = True
            continue
        if line.startswith("legend"):
            if line != "legend" and ":" in line:
                continue
            in_legend = True
            continue
        lowered = line.lower()
        if any(lowered.startswith(p) for p in _DISCARD_PREFIXES):
            continue

        if st.open_classifier is not None:
            if line == "}":
                st.open_classifier = None
                continue
            if _BODY_SEPARATOR_RE.match(line):
                continue
            member = _parse_member(line, st.open_classifier.kind)
            if member is None:
                st.report.add("unparseable-member", "error", lineno,
                              f"cannot parse member line: {line!r}")
            else:
                st.open_classifier.members.append(member)
            continue

        if line == "}":
            if st.package_stack:
                st.package_stack.pop()
            else:
                st.report.add("unbalanced-brace", "error", lineno,
                              "closing brace without open scope")
            continue

        m = _PACKAGE_RE.match(line)
        if m:
            name = m.group("qname") or m.group("name")
            if m.group("brace"):
                st.package_stack.append(name)
            continue

        m = _CLASSIFIER_RE.match(line)
        if m:
            kw = " ".join(m.group("kw").split())
            kind = {"class": "class", "abstract class": "abstract_class",
                    "abstract": "abstract_class", "interface": "interface",
                    "enum": "enum"}[kw]
            name = m.group("qname") or m.group("name")
            c = st.declare(name, kind, lineno)
            brace = m.group("brace") or ""
            if brace.startswith("{") and not brace.endswith("}"):
                st.open_classifier = c
            continue

        m = _RELATION_RE.match(line)
        if m:
            arrow = m.group("arrow")
            kind = reversed_ = None
            for i, (pat, k, rev) in enumerate(_ARROWS):
                if m.group(f"a{i}"):
                    kind, reversed_ = k, rev
                    break
            src, tgt = m.group("src"), m.group("tgt")
            smult, tmult = m.group("smult"), m.group("tmult")
            if reversed_:
                src, tgt = tgt, src
                smult, tmult = tmult, smult
            label = m.group("label") or None
            st.model.relations.append(Relation(
                source=src, target=tgt, kind=kind,
                source_mult=smult, target_mult=tmult, label=label,
            ))
            for endpoint in (src, tgt):
                if endpoint not in st.relation_scopes:
                    st.relation_scopes[endpoint] = st.current_package()
            continue

        st.report.add("unparseable-line", "error", lineno,
                      f"cannot parse line: {line!r}")

    # auto-declare classifiers referenced only in relations
    for rel in st.model.relations:
        for endpoint in (rel.source, rel.target):
            if endpoint not in st.registry:
                scope = st.relation_scopes.get(endpoint)
                c = Classifier(name=endpoint, kind="class",
                               owning_package=scope, auto_declared=True)
                st.registry[endpoint] = c
                st.model.classifiers.append(c)
                st.report.add(
                    "auto-declared", "warning", 0,
                    f"{endpoint} referenced in a relation but never declared; "
                    "added as a plain class")
    return st.model, st.report


# --- validation ---------------------------------------------------------------

def _is_placeholder(type_name: str) -> bool:
    return bool(_PLACEHOLDER_RE.match(type_name.strip()))


def validate_model(model: ClassModel) -> ValidationReport:
    """Semantic checks over a class model; always returns a report."""
    rep = ValidationReport()
    seen: dict[tuple[str | None, str], int] = {}
    names = set()
    for c in model.classifiers:
        names.add(c.name)
        key = (c.owning_package, c.name)
        seen[key] = seen.get(key, 0) + 1
        if seen[key] == 2:
            rep.add("duplicate-classifier", "error", 0,
                    f"classifier {c.name!r} declared twice in package "
                    f"{c.owning_package or '(root)'}")
        if not c.members and not c.auto_declared:
            rep.add("empty-class", "warning", 0,
                    f"{c.name} has no attributes or methods")
        for memb in c.members:
            types = [memb.type] + [p.type for p in memb.params]
            for t in types:
                if t and _is_placeholder(t):
                    rep.add("placeholder-type", "error", 0,
                            f"{c.name}.{memb.name} uses placeholder type {t!r}")
            if c.kind == "enum":
                if memb.member_kind == "method" or memb.params:
                    rep.add("enum-parameter-list", "error", 0,
                            f"enum {c.name} member {memb.name} has a parameter list")
            elif not memb.type:
                rep.add("missing-type", "warning", 0,
                        f"{c.name}.{memb.name} has no concrete type")
    for rel in model.relations:
        for endpoint in (rel.source, rel.target):
            if endpoint not in names:
                rep.add("unresolved-endpoint", "error", 0,
                        f"relation references undeclared classifier {endpoint!r}")
        for mult in (rel.source_mult, rel.target_mult):
            if mult is not None and not _MULT_RE.match(mult):
                rep.add("invalid-multiplicity", "error", 0,
                        f"multiplicity {mult!r} on {rel.source}->{rel.target} "
                        "does not match INT | * | INT..(INT|*)")
        if (rel.kind == "association" and rel.source_mult is None
                and rel.target_mult is None):
            rep.add("missing-multiplicity", "warning", 0,
                    f"association {rel.source} --> {rel.target} has no multiplicities")
    return rep


def parse_and_validate(text: str) -> tuple[ClassModel, ValidationReport]:
    """Parse then validate; diagnostics merged into a single report."""
    model, rep = parse_plantuml(text)
    rep.extend(validate_model(model))
    return model, rep


# --- emission -------------------------------------------------------------------

_KIND_KEYWORDS = {"class": "class", "abstract_class": "abstract class",
                  "interface": "interface", "enum": "enum"}
_KIND_ARROWS = {"association": "-->", "generalization": "--|>",
                "realization": "..|>", "aggregation": "o--",
                "composition": "*--"}


def _emit_name(name: str) -> str:
    return name if re.fullmatch(_IDENT, name) else f'"{name}"'


def _emit_classifier(c: Classifier, indent: str) -> list[str]:
    head = f"{indent}{_KIND_KEYWORDS[c.kind]} {_emit_name(c.name)}"
    if not c.members:
        return [head]
    lines = [head + " {"]
    lines.extend(f"{indent}  {m.signature()}" for m in c.members)
    lines.append(indent + "}")
    return lines


def _emit_relation(r: Relation) -> str:
    parts = [_emit_name(r.source)]
    if r.source_mult is not None:
        parts.append(f'"{r.source_mult}"')
    parts.append(_KIND_ARROWS[r.kind])
    if r.target_mult is not None:
        parts.append(f'"{r.target_mult}"')
    parts.append(_emit_name(r.target))
    line = " ".join(parts)
    if r.label:
        line += f" : {r.label}"
    return line


def emit_plantuml(model: ClassModel) -> str:
    """Serialize to canonical PlantUML: packages, classifiers, then relations.

    Packages and classifiers are ordered alphabetically, relations by their
    full key; the output re-parses to a structurally equal model. Raises
    UmlError when the model carries error-severity violations.
    """
    rep = validate_model(model)
    if not rep.ok:
        codes = sorted({v.code for v in rep.errors})
        raise UmlError(f"cannot emit model with error violations: {codes}")
    lines = ["@startuml"]
    by_package: dict[str, list[Classifier]] = {}
    top_level: list[Classifier] = []
    for c in model.classifiers:
        if c.owning_package is None:
            top_level.append(c)
        else:
            by_package.setdefault(c.owning_package, []).append(c)
    for pkg in sorted(by_package):
        lines.append(f'package "{pkg}" {{')
        for c in sorted(by_package[pkg], key=lambda c: c.name):
            lines.extend(_emit_classifier(c, "  "))
        lines.append("}")
    for c in sorted(top_level, key=lambda c: c.name):
        lines.extend(_emit_classifier(c, ""))
    for r in sorted(model.relations, key=lambda r: r.key()):
        lines.append(_emit_relation(r))
    lines.append("@enduml")
    return "\n".join(lines)


# --- term extraction and diffing -------------------------------------------------

_CAMEL_1 = re.compile(r"([a-z0-9])([A-Z])")
_CAMEL_2 = re.compile(r"([A-Z]+)([A-Z][a-z])")


def split_identifier(ident: str) -> list[str]:
    """Lowercased word parts of an identifier (underscore + CamelCase split)."""
    s = _CAMEL_2.sub(r"\1 \2", _CAMEL_1.sub(r"\1 \2", ident))
    parts = re.split(r"[^A-Za-z0-9]+", s)
    return [p.lower() for p in parts if p and not p.isdigit()]


@lru_cache(maxsize=1)
def stop_words() -> frozenset[str]:
    """The fixed 50-word English stop list shipped with the package."""
    text = resources.files("modelbench").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.split() if w.strip())


def extract_terms(model: ClassModel) -> Counter[str]:
    """Multiset of lowercase word tokens from names in the model.

    Covers package names, classifier names, member names, and relation
    labels; type names and multiplicities are not terminology.
    """
    terms: Counter[str] = Counter()
    for pkg in model.packages:
        terms.update(split_identifier(pkg.name))
    for c in model.classifiers:
        terms.update(split_identifier(c.name))
        for m in c.members:
            terms.update(split_identifier(m.name))
    for r in model.relations:
        if r.label:
            terms.update(split_identifier(r.label))
    return terms


def _text_terms(text: str) -> set[str]:
    out: set[str] = set()
    for token in re.split(r"[^A-Za-z0-9]+", text):
        out.update(split_identifier(token))
    return out


def term_alignment(model: ClassModel, doc) -> float:
    """Share of the model's vocabulary found in the requirements text.

    Stop words removed on both sides; 0.0 for a model with no terms. An
    advisory signal only, not the judged terminology score.
    """
    stop = stop_words()
    model_terms = set(extract_terms(model)) - stop
    if not model_terms:
        return 0.0
    doc_text = " ".join(item.text for item in doc.items)
    doc_terms = _text_terms(doc_text) - stop
    return len(model_terms & doc_terms) / len(model_terms)


@dataclass(frozen=True)
class ModelDiff:
    classifiers_only_in_a: tuple[str, ...]
    classifiers_only_in_b: tuple[str, ...]
    relations_only_in_a: tuple[Relation, ...]
    relations_only_in_b: tuple[Relation, ...]
    member_deltas: dict[str, dict[str, tuple[str, ...]]]

    def is_empty(self) -> bool:
        return not (self.classifiers_only_in_a or self.classifiers_only_in_b
                    or self.relations_only_in_a or self.relations_only_in_b
                    or self.member_deltas)


def model_diff(a: ClassModel, b: ClassModel) -> ModelDiff:
    """Structural differences between two models (symmetric)."""
    names_a = {c.name for c in a.classifiers}
    names_b = {c.name for c in b.classifiers}
    rels_a = Counter(r.key() for r in a.relations)
    rels_b = Counter(r.key() for r in b.relations)
    only_a = tuple(sorted((rels_a - rels_b).elements()))
    only_b = tuple(sorted((rels_b - rels_a).elements()))
    by_key_a = {r.key(): r for r in a.relations}
    by_key_b = {r.key(): r for r in b.relations}

    member_deltas: dict[str, dict[str, tuple[str, ...]]] = {}
    for name in sorted(names_a & names_b):
        ma = Counter(m.signature() for m in a.classifier(name).members)
        mb = Counter(m.signature() for m in b.classifier(name).members)
        da = tuple(sorted((ma - mb).elements()))
        db = tuple(sorted((mb - ma).elements()))
        if da or db:
            member_deltas[name] = {"only_in_a": da, "only_in_b": db}

    return ModelDiff(
        classifiers_only_in_a=tuple(sorted(names_a - names_b)),
        classifiers_only_in_b=tuple(sorted(names_b - names_a)),
        relations_only_in_a=tuple(by_key_a[k] for k in only_a),
        relations_only_in_b=tuple(by_key_b[k] for k in only_b),
        member_deltas=member_deltas,
    )


def to_render_graph(model: ClassModel) -> RenderGraph:
    """Lossless node/edge projection for client-side rendering."""
    nodes = tuple(
        RenderNode(id=c.name, kind=c.kind, label=c.name,
                   package=c.owning_package,
                   members=tuple(m.signature() for m in c.members))
        for c in model.classifiers
    )
    edges = tuple(
        RenderEdge(source=r.source, target=r.target, kind=r.kind,
                   source_mult=r.source_mult, target_mult=r.target_mult,
                   label=r.label)
        for r in model.relations
    )
    return RenderGraph(nodes=nodes, edges=edges)
