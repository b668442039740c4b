"""Requirements corpus: manifest plus one plain-text document per dataset.

Layout: ``<root>/manifest.json`` and ``<root>/<dataset-id>.txt`` with one
requirement per line (blank lines ignored). Requirement ids are taken from
an explicit ``R<n>:`` prefix when present, otherwise auto-assigned in file
order.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

logger = logging.getLogger(__name__)

KINDS = {"us": "user_story", "s": "shall"}

_RID_RE = re.compile(r"^([A-Z][A-Z0-9_-]*\d+):\s+(.*)$")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class RequirementItem:
    rid: str
    text: str


@dataclass(frozen=True)
class RequirementsDoc:
    id: str
    domain: str
    kind: str  # user_story | shall
    items: tuple[RequirementItem, ...]
    reconstructed: bool = False


@dataclass(frozen=True)
class ManifestEntry:
    dataset_id: str
    domain: str
    kind: str
    expected_req_count: int
    reconstructed: bool = False


@dataclass(frozen=True)
class CorpusManifest:
    entries: tuple[ManifestEntry, ...]

    def dataset_order(self) -> tuple[str, ...]:
        return tuple(e.dataset_id for e in self.entries)


def _parse_manifest(path: Path) -> CorpusManifest:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"manifest is not valid JSON: {exc}") from exc
    entries = []
    seen = set()
    for obj in raw.get("datasets", []):
        ds = obj["id"]
        if ds in seen:
            raise CorpusError(f"duplicate dataset id {ds!r} in manifest")
        seen.add(ds)
        kind_code = obj.get("kind", "s")
        if kind_code not in KINDS:
            raise CorpusError(f"dataset {ds!r}: unknown kind {kind_code!r} (use us/s)")
        count = int(obj.get("expected_req_count", 0))
        if count <= 0:
            raise CorpusError(f"dataset {ds!r}: expected_req_count must be positive")
        entries.append(ManifestEntry(
            dataset_id=ds,
            domain=obj.get("domain", ""),
            kind=kind_code,
            expected_req_count=count,
            reconstructed=bool(obj.get("reconstructed", False)),
        ))
    if not entries:
        raise CorpusError("manifest lists no datasets")
    return CorpusManifest(entries=tuple(entries))


def _load_doc(entry: ManifestEntry, path: Path) -> RequirementsDoc:
    items: list[RequirementItem] = []
    auto = 0
    for line in path.read_text(encoding="utf-8").splitlines():
        text = line.strip()
        if not text:
            continue
        m = _RID_RE.match(text)
        if m:
            items.append(RequirementItem(rid=m.group(1), text=m.group(2).strip()))
        else:
            auto += 1
            items.append(RequirementItem(rid=f"R{len(items) + 1}", text=text))
    if not items:
        raise CorpusError(f"document {path.name} contains no requirements")
    rids = [it.rid for it in items]
    if len(set(rids)) != len(rids):
        raise CorpusError(f"document {path.name} has duplicate requirement ids")
    return RequirementsDoc(
        id=entry.dataset_id,
        domain=entry.domain,
        kind=KINDS[entry.kind],
        items=tuple(items),
        reconstructed=entry.reconstructed,
    )


def load_corpus(root_path: str | Path) -> tuple[CorpusManifest, list[RequirementsDoc]]:
    """Load the manifest and every listed document.

    A document whose item count differs from the manifest expectation is
    kept and logged as a warning; a missing document file is fatal.
    """
    root = Path(root_path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise CorpusError(f"manifest not found at {manifest_path}")
    manifest = _parse_manifest(manifest_path)
    docs: list[RequirementsDoc] = []
    for entry in manifest.entries:
        doc_path = root / f"{entry.dataset_id}.txt"
        if not doc_path.is_file():
            raise CorpusError(f"missing document file {doc_path.name} "
                              f"for dataset {entry.dataset_id!r}")
        doc = _load_doc(entry, doc_path)
        if len(doc.items) != entry.expected_req_count:
            logger.warning(
                "dataset %s: manifest expects %d requirements, document has %d",
                entry.dataset_id, entry.expected_req_count, len(doc.items))
        docs.append(doc)
    return manifest, docs


def requirements_text(doc: RequirementsDoc) -> str:
    """One requirement per line, ``rid: text``, in document order."""
    return "\n".join(f"{it.rid}: {it.text}" for it in doc.items)
