"""Streaming parsers for KG dumps plus the ConceptNet curation filters.

Every parser returns ``(tuples, report)``; ``tuples`` is a lazy iterator and
``report`` is complete once the iterator is exhausted. Bad records are
counted and skipped, never fatal.
"""
from __future__ import annotations

import csv
import gzip
import io
import json
import logging
import os
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .kg_core import (ATOMIC, ATOMIC2020, CONCEPTNET, KGTuple, KnowledgeGraph, RelationId,
                      RelationMapping, RelationRegistry, data_path, iter_table)

log = logging.getLogger(__name__)

FORMATS = ("conceptnet-edges", "generic-jsonl", "atomic-tsv")
ATOMIC_RELATIONS = ("oEffect", "oReact", "oWant", "xAttr", "xEffect",
                    "xIntent", "xNeed", "xReact", "xWant")
MAX_ERROR_SAMPLES = 20


@dataclass
class IngestConfig:
    format: str = "generic-jsonl"
    english_only: bool = True
    min_weight_exclusive: float | None = None
    keep_equal: bool = False
    relation_whitelist: frozenset[str] | None = None
    relation_blacklist: frozenset[str] | None = None
    dedup_exact: bool = False

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}; expected one of {FORMATS}")
        if self.relation_whitelist is not None and self.relation_blacklist is not None:
            raise ValueError("set at most one of relation_whitelist / relation_blacklist")
        if self.min_weight_exclusive is not None and self.min_weight_exclusive < 0:
            raise ValueError("min_weight_exclusive must be >= 0")
        if self.relation_whitelist is not None:
            self.relation_whitelist = frozenset(self.relation_whitelist)
        if self.relation_blacklist is not None:
            self.relation_blacklist = frozenset(self.relation_blacklist)

    def weight_ok(self, weight: float | None) -> bool:
        thr = self.min_weight_exclusive
        if thr is None:
            return True
        if weight is None:
            return False
        return weight >= thr if self.keep_equal else weight > thr


# ConceptNet: drop weight <= 0.5.  TransOMCS: keep confidence >= 0.5.
CONCEPTNET_PRESET = dict(format="conceptnet-edges", english_only=True,
                         min_weight_exclusive=0.5, keep_equal=False, dedup_exact=True)
TRANSOMCS_PRESET = dict(format="generic-jsonl", min_weight_exclusive=0.5, keep_equal=True,
                        dedup_exact=True)


@dataclass
class IngestReport:
    read: int = 0
    kept: int = 0
    rejected_by: Counter = field(default_factory=Counter)
    warnings: Counter = field(default_factory=Counter)
    errors: list[str] = field(default_factory=list)

    def reject(self, reason: str, locus: str | None = None, detail: str = "") -> None:
        self.rejected_by[reason] += 1
        if reason == "malformed" and locus and len(self.errors) < MAX_ERROR_SAMPLES:
            self.errors.append(f"{locus}: {detail}" if detail else locus)

    @property
    def balanced(self) -> bool:
        return self.read == self.kept + sum(self.rejected_by.values())

    def to_dict(self) -> dict:
        return {"read": self.read, "kept": self.kept,
                "rejected_by": dict(sorted(self.rejected_by.items())),
                "warnings": dict(sorted(self.warnings.items())), "errors": list(self.errors)}


def open_text(source) -> tuple[Iterable[str], str]:
    """Lines of a path or stream, gunzipping transparently. Returns (lines, name)."""
    if isinstance(source, (str, os.PathLike)):
        name = os.fspath(source)
        with open(name, "rb") as fh:
            magic = fh.read(2)
        if magic == b"\x1f\x8b":
            return io.TextIOWrapper(gzip.open(name, "rb"), encoding="utf-8", errors="replace"), name
        return open(name, encoding="utf-8", errors="replace", newline=""), name
    name = getattr(source, "name", "<stream>")
    if isinstance(source, (io.RawIOBase, io.BufferedIOBase)) or hasattr(source, "peek"):
        buf = source if hasattr(source, "peek") else io.BufferedReader(source)
        if buf.peek(2)[:2] == b"\x1f\x8b":
            buf = gzip.GzipFile(fileobj=buf)
        return io.TextIOWrapper(buf, encoding="utf-8", errors="replace", newline=""), str(name)
    return (ln.decode("utf-8", "replace") if isinstance(ln, bytes) else ln for ln in source), str(name)


def _relation_reason(name: str, config: IngestConfig) -> str | None:
    if config.relation_blacklist is not None and name in config.relation_blacklist:
        return "blacklisted-relation"
    if config.relation_whitelist is not None and name not in config.relation_whitelist:
        return "not-whitelisted"
    return None


def _concept_term(uri: str) -> tuple[str, str] | None:
    # /c/<lang>/<term>[/<pos>/...]
    parts = uri.split("/")
    if len(parts) < 4 or parts[0] != "" or parts[1] != "c" or not parts[3]:
        return None
    return parts[2], parts[3].replace("_", " ")


def parse_conceptnet_edges(source, config: IngestConfig | None = None,
                           kg: str = CONCEPTNET) -> tuple[Iterator[KGTuple], IngestReport]:
    """Parse a ConceptNet assertion dump (edge, relation, start, end, JSON metadata)."""
    config = config or IngestConfig(format="conceptnet-edges")
    report = IngestReport()

    def gen():
        lines, name = open_text(source)
        seen: set[tuple[str, str, str]] = set()
        for lineno, line in enumerate(lines, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            report.read += 1
            locus = f"{name}:{lineno}"
            fields = line.split("\t")
            if len(fields) < 5 or not fields[1].startswith("/r/"):
                report.reject("malformed", locus, "expected 5 tab-separated fields")
                continue
            start, end = _concept_term(fields[2]), _concept_term(fields[3])
            rel_name = fields[1][3:].strip("/")
            if start is None or end is None or not rel_name:
                report.reject("malformed", locus, "unparseable concept or relation URI")
                continue
            if config.english_only and not (fields[2].startswith("/c/en/")
                                            and fields[3].startswith("/c/en/")):
                report.reject("non-english")
                continue
            reason = _relation_reason(rel_name, config)
            if reason:
                report.reject(reason)
                continue
            weight = None
            try:
                meta = json.loads(fields[4])
                w = meta.get("weight") if isinstance(meta, dict) else None
                if isinstance(w, (int, float)) and not isinstance(w, bool) and w >= 0:
                    weight = float(w)
            except (json.JSONDecodeError, ValueError):
                pass
            if not config.weight_ok(weight):
                report.reject("low-weight")
                continue
            head, tail = start[1], end[1]
            triple = (head, rel_name, tail)
            if config.dedup_exact:
                if triple in seen:
                    report.reject("duplicate")
                    continue
                seen.add(triple)
            try:
                t = KGTuple(head, RelationId(kg, rel_name), tail, weight, kg, None, f"{kg}:{lineno}")
            except ValueError as exc:
                report.reject("malformed", locus, str(exc))
                continue
            report.kept += 1
            yield t

    return gen(), report


def parse_generic_jsonl(source, kg: str, config: IngestConfig | None = None,
                        registry: RelationRegistry | None = None
                        ) -> tuple[Iterator[KGTuple], IngestReport]:
    """Parse canonical tuple JSONL: {head, relation, tail[, weight, split, id, kg, source]}."""
    config = config or IngestConfig()
    report = IngestReport()

    def gen():
        lines, name = open_text(source)
        seen: set[tuple[str, str, str]] = set()
        for lineno, line in enumerate(lines, 1):
            if not line.strip():
                continue
            report.read += 1
            locus = f"{name}:{lineno}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                report.reject("malformed", locus, f"invalid JSON ({exc.msg})")
                continue
            if not isinstance(rec, dict):
                report.reject("malformed", locus, "not a JSON object")
                continue
            head, rel, tail = rec.get("head"), rec.get("relation"), rec.get("tail")
            if not all(isinstance(v, str) and v.strip() for v in (head, rel, tail)):
                report.reject("malformed", locus, "missing head/relation/tail")
                continue
            space = rec.get("kg") or kg
            if registry is not None:
                rel = registry.canonical_name(space, rel)
            reason = _relation_reason(rel, config)
            if reason:
                report.reject(reason)
                continue
            weight = rec.get("weight")
            if weight is not None and (isinstance(weight, bool) or not isinstance(weight, (int, float))):
                weight = None
            if not config.weight_ok(weight):
                report.reject("low-weight")
                continue
            if config.dedup_exact:
                triple = (head, rel, tail)
                if triple in seen:
                    report.reject("duplicate")
                    continue
                seen.add(triple)
            try:
                t = KGTuple(head, RelationId(space, rel), tail,
                            None if weight is None else float(weight),
                            rec.get("source") or kg, rec.get("split") or None,
                            str(rec["id"]) if rec.get("id") is not None else f"{kg}:{lineno}")
            except ValueError as exc:
                report.reject("malformed", locus, str(exc))
                continue
            report.kept += 1
            yield t

    return gen(), report


def parse_atomic_tsv(source, config: IngestConfig | None = None, kg: str = ATOMIC,
                     delimiter: str = "\t") -> tuple[Iterator[KGTuple], IngestReport]:
    """Parse ATOMIC's release layout: event, one JSON list of tails per relation, [split].

    ``read`` counts candidate tuples (one per list element) plus one per
    malformed cell or row.
    """
    config = config or IngestConfig(format="atomic-tsv")
    report = IngestReport()

    def gen():
        lines, name = open_text(source)
        reader = csv.reader(lines, delimiter=delimiter)
        columns = ["event", *ATOMIC_RELATIONS]
        seen: set[tuple[str, str, str]] = set()
        for rowno, row in enumerate(reader, 1):
            if not row or not any(c.strip() for c in row):
                continue
            if rowno == 1 and row[0].strip().lower() == "event":
                columns = [c.strip() for c in row]
                continue
            locus = f"{name}:{rowno}"
            if len(row) < 1 + len(ATOMIC_RELATIONS) and len(row) != len(columns):
                report.read += 1
                report.reject("malformed", locus, f"expected {len(columns)} columns, got {len(row)}")
                continue
            event = row[0]
            split = None
            if "split" in columns:
                i = columns.index("split")
                split = row[i].strip() if i < len(row) and row[i].strip() else None
                if split == "trn":
                    split = "train"
                elif split == "tst":
                    split = "test"
            for col, cell in zip(columns[1:], row[1:]):
                if col not in ATOMIC_RELATIONS:
                    continue
                try:
                    tails = json.loads(cell)
                    if not isinstance(tails, list):
                        raise ValueError("not a list")
                except ValueError:
                    report.read += 1
                    report.reject("malformed", f"{locus}:{col}", "unparseable JSON cell")
                    continue
                reason = _relation_reason(col, config)
                if reason:
                    report.read += len(tails)
                    report.rejected_by[reason] += len(tails)
                    continue
                for k, tail in enumerate(tails):
                    report.read += 1
                    if not isinstance(tail, str) or not tail.strip() or tail.strip().lower() == "none":
                        report.reject("empty-tail")
                        continue
                    if config.dedup_exact:
                        triple = (event, col, tail)
                        if triple in seen:
                            report.reject("duplicate")
                            continue
                        seen.add(triple)
                    try:
                        t = KGTuple(event, RelationId(kg, col), tail, None, kg, split,
                                    f"{kg}:{rowno}:{col}:{k}")
                    except ValueError as exc:
                        report.reject("malformed", locus, str(exc))
                        continue
                    report.kept += 1
                    yield t

    return gen(), report


def parse(source, config: IngestConfig, kg: str,
          registry: RelationRegistry | None = None) -> tuple[Iterator[KGTuple], IngestReport]:
    if config.format == "conceptnet-edges":
        return parse_conceptnet_edges(source, config, kg)
    if config.format == "atomic-tsv":
        return parse_atomic_tsv(source, config, kg)
    return parse_generic_jsonl(source, kg, config, registry)


# -- ConceptNet curation -----------------------------------------------------

@dataclass
class CurationRules:
    removals: frozenset[str] = frozenset()
    removal_prefixes: tuple[str, ...] = ()
    splits: list[tuple[str, re.Pattern, str]] = field(default_factory=list)
    drops: list[tuple[str, re.Pattern | None, object]] = field(default_factory=list)
    drop_ids: frozenset[str] = frozenset()

    @classmethod
    def from_file(cls, path=None, countries=None, drop_ids: Iterable[str] = ()):
        path = path or data_path("curation_rules.tsv")
        removals, prefixes, splits, drops = set(), [], [], []
        gazetteer = None
        for row in iter_table(path):
            kind = row[0]
            if kind == "remove":
                if row[1].endswith("*"):
                    prefixes.append(row[1][:-1])
                else:
                    removals.add(row[1])
            elif kind == "split":
                splits.append((row[1], re.compile(row[2], re.IGNORECASE), row[3]))
            elif kind == "drop":
                head = None if row[2] == "-" else re.compile(row[2], re.IGNORECASE)
                if row[3] == "@countries":
                    if gazetteer is None:
                        gazetteer = load_countries(countries)
                    tail = gazetteer
                else:
                    tail = None if row[3] == "-" else re.compile(row[3], re.IGNORECASE)
                drops.append((row[1], head, tail))
            else:
                raise ValueError(f"{path}: unknown rule kind {kind!r}")
        return cls(frozenset(removals), tuple(prefixes), splits, drops, frozenset(drop_ids))

    def removed(self, name: str) -> bool:
        return name in self.removals or (bool(self.removal_prefixes)
                                         and name.startswith(self.removal_prefixes))


def load_countries(path=None) -> frozenset[str]:
    path = path or data_path("countries.txt")
    with open(path, encoding="utf-8") as fh:
        return frozenset(ln.strip().lower() for ln in fh if ln.strip() and not ln.startswith("#"))


def _matches(pattern, text: str) -> bool:
    if pattern is None:
        return True
    if isinstance(pattern, frozenset):
        return " ".join(text.lower().split()) in pattern
    return pattern.search(text) is not None


def apply_conceptnet_curation(tuples: Iterable[KGTuple], mapping: RelationMapping,
                              rules: CurationRules | None = None,
                              target_kg: str = ATOMIC2020
                              ) -> tuple[Iterator[KGTuple], IngestReport]:
    """Drop non-commonsense relations and deterministic facts; remap the rest.

    Surviving tuples move to ``target_kg``'s relation space (split rules
    first, else the mapping's primary target); their ``source`` tag stays.
    """
    rules = rules or CurationRules.from_file()
    report = IngestReport()

    def gen():
        for t in tuples:
            report.read += 1
            name = t.relation.name
            if t.id in rules.drop_ids:
                report.reject("dropped-by-id")
                continue
            if rules.removed(name):
                report.reject("removed-relation")
                continue
            if any(rel == name and _matches(h, t.head) and _matches(tl, t.tail)
                   for rel, h, tl in rules.drops):
                report.reject("deterministic-fact")
                continue
            target = None
            for rel, pattern, tgt in rules.splits:
                if rel == name and pattern.search(t.tail):
                    target = tgt
                    break
            if target is None:
                entry = mapping.get(t.relation)
                if entry is None:
                    report.warnings["unmapped-relation"] += 1
                    report.kept += 1
                    yield t
                    continue
                target = entry.primary.name
            report.kept += 1
            yield KGTuple(t.head, RelationId(target_kg, target), t.tail, t.weight,
                          t.source, t.split, t.id)

    return gen(), report


# -- canonical JSONL I/O -----------------------------------------------------

def write_jsonl(tuples: Iterable[KGTuple], dest: str | os.PathLike | IO[str]) -> int:
    n = 0
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            return write_jsonl(tuples, fh)
    for t in tuples:
        dest.write(json.dumps(t.to_record(), ensure_ascii=False, sort_keys=True) + "\n")
        n += 1
    return n


def load_kg(source, kg: str, config: IngestConfig | None = None,
            registry: RelationRegistry | None = None,
            label: str | None = None) -> tuple[KnowledgeGraph, IngestReport]:
    """Ingest a whole file into a frozen KnowledgeGraph.

    Records whose ``kg`` field names another relation space are an error:
    e.g. curated ConceptNet output lives in the ATOMIC-2020 space and must be
    loaded with ``kg="atomic2020"``. ``label`` names the graph when it should
    differ from its relation space.
    """
    config = config or IngestConfig()
    tuples, report = parse(source, config, kg, registry)
    graph = KnowledgeGraph(label or kg, registry=registry, space=kg)
    for t in tuples:
        graph.add(t)
    return graph.freeze(), report
