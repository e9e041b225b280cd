"""Shared domain types: tuples, relation registries, cross-KG mappings, KG handles."""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

ATOMIC2020 = "atomic2020"
ATOMIC = "atomic"
CONCEPTNET = "conceptnet"
TRANSOMCS = "transomcs"

CATEGORIES = ("physical-entity", "event-centered", "social-interaction", "other")
SPLITS = ("train", "dev", "test")

DATA_DIR_ENV = "CSKGKIT_DATA_DIR"


def data_path(name: str) -> Path:
    """Locate a shipped data file, honouring the override directory env var."""
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        candidate = Path(override) / name
        if candidate.exists():
            return candidate
    return Path(str(resources.files("cskgkit") / "data" / name))


def derive_seed(seed: int, stream: str) -> int:
    """Independent 64-bit seed for a named random stream under one top-level seed."""
    return int.from_bytes(hashlib.sha256(f"{seed}:{stream}".encode()).digest()[:8], "big")


def iter_table(path: str | os.PathLike) -> Iterator[list[str]]:
    """Yield tab-split rows of a data table, skipping comments and blank lines."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            yield line.split("\t")


@dataclass(frozen=True, order=True, slots=True)
class RelationId:
    kg: str
    name: str

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise ValueError(f"invalid relation name {self.name!r}")

    def __str__(self):
        return f"{self.kg}:{self.name}"


@dataclass(frozen=True, slots=True)
class KGTuple:
    """One (head, relation, tail) assertion."""

    head: str
    relation: RelationId
    tail: str
    weight: float | None = None
    source: str = ""
    split: str | None = None
    id: str = ""

    def __post_init__(self):
        if not self.head.strip() or not self.tail.strip():
            raise ValueError(f"empty head or tail in tuple {self.id!r}")
        if self.weight is not None and not self.weight >= 0:
            raise ValueError(f"negative or NaN weight in tuple {self.id!r}")
        if self.split is not None and self.split not in SPLITS:
            raise ValueError(f"unknown split tag {self.split!r}")

    def to_record(self) -> dict:
        rec = {"id": self.id, "head": self.head, "relation": self.relation.name,
               "tail": self.tail, "kg": self.relation.kg, "source": self.source}
        if self.weight is not None:
            rec["weight"] = self.weight
        if self.split is not None:
            rec["split"] = self.split
        return rec


class RelationRegistry:
    """Relation vocabularies per KG, with categories and name aliases.

    Immutable after construction; :attr:`mapping` optionally carries the
    default cross-KG mapping attached by :func:`load_default_registries`.
    """

    def __init__(self, rows: Iterable[tuple[str, str, str]] = (),
                 aliases: Iterable[tuple[str, str, str]] = ()):
        self._relations: dict[str, set[str]] = {}
        self._category: dict[RelationId, str] = {}
        for kg, name, category in rows:
            rid = RelationId(kg, name)
            if rid in self._category:
                raise ValueError(f"duplicate relation {rid}")
            if category not in CATEGORIES:
                raise ValueError(f"unknown category {category!r} for {rid}")
            self._relations.setdefault(kg, set()).add(name)
            self._category[rid] = category
        self._aliases = {(kg, alias): canon for kg, alias, canon in aliases}
        self.mapping: RelationMapping | None = None

    @classmethod
    def from_files(cls, relations: str | os.PathLike, aliases: str | os.PathLike | None = None):
        rows = [tuple(r[:3]) for r in iter_table(relations)]
        alias_rows = [tuple(r[:3]) for r in iter_table(aliases)] if aliases else []
        return cls(rows, alias_rows)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# kg\trelation\tcategory\n")
            for rid in sorted(self._category):
                fh.write(f"{rid.kg}\t{rid.name}\t{self._category[rid]}\n")

    def kgs(self) -> list[str]:
        return sorted(self._relations)

    def relations(self, kg: str | None = None) -> list[RelationId]:
        if kg is None:
            return sorted(self._category)
        return sorted(RelationId(kg, n) for n in self._relations.get(kg, ()))

    def __contains__(self, rid: RelationId) -> bool:
        return rid in self._category

    def __len__(self):
        return len(self._category)

    def category(self, rid: RelationId) -> str:
        return self._category[rid]

    def categories(self) -> dict[RelationId, str]:
        return dict(self._category)

    def canonical_name(self, kg: str, name: str) -> str:
        return self._aliases.get((kg, name), name)

    def resolve(self, kg: str, name: str) -> RelationId | None:
        """Return the registered id for ``name`` (aliases applied) or None."""
        rid = RelationId(kg, self.canonical_name(kg, name))
        return rid if rid in self._category else None


@dataclass(frozen=True)
class MappingEntry:
    source: RelationId
    targets: tuple[RelationId, ...]
    primary: RelationId


class RelationMapping:
    """Cross-KG relation alignment, many-to-many with a designated primary target."""

    def __init__(self, entries: Iterable[MappingEntry] = ()):
        self.entries: dict[RelationId, MappingEntry] = {}
        self.duplicates: list[RelationId] = []
        for entry in entries:
            if entry.source in self.entries:
                self.duplicates.append(entry.source)
                continue
            self.entries[entry.source] = entry

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, str, str, str]], target_kg: str = ATOMIC2020):
        grouped: dict[RelationId, tuple[list[RelationId], list[RelationId]]] = {}
        for src_kg, src_rel, tgt_rel, is_primary in rows:
            targets, primaries = grouped.setdefault(RelationId(src_kg, src_rel), ([], []))
            tgt = RelationId(target_kg, tgt_rel)
            if tgt not in targets:
                targets.append(tgt)
            if is_primary.strip().lower() in ("1", "true", "yes", "*"):
                primaries.append(tgt)
        entries = []
        for src, (targets, primaries) in grouped.items():
            primary = primaries[0] if primaries else targets[0]
            entries.append(MappingEntry(src, tuple(targets), primary))
        return cls(entries)

    @classmethod
    def from_file(cls, path: str | os.PathLike, target_kg: str = ATOMIC2020):
        return cls.from_rows((tuple(r[:4]) for r in iter_table(path)), target_kg)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# source_kg\tsource_relation\ttarget_relation\tis_primary\n")
            for src in sorted(self.entries):
                entry = self.entries[src]
                for tgt in entry.targets:
                    fh.write(f"{src.kg}\t{src.name}\t{tgt.name}\t{int(tgt == entry.primary)}\n")

    def __contains__(self, rid: RelationId) -> bool:
        return rid in self.entries

    def __len__(self):
        return len(self.entries)

    def get(self, rid: RelationId) -> MappingEntry | None:
        return self.entries.get(rid)

    def targets(self, rid: RelationId, mode: str = "all-targets") -> tuple[RelationId, ...]:
        """Mapped relations for ``rid``; empty when unmapped."""
        entry = self.entries.get(rid)
        if entry is None:
            return ()
        if mode == "primary-only":
            return (entry.primary,)
        if mode == "all-targets":
            return entry.targets
        raise ValueError(f"unknown mapping mode {mode!r}")

    def digest_rows(self) -> list[str]:
        return [f"{src}>{','.join(map(str, e.targets))}>{e.primary}"
                for src, e in sorted(self.entries.items())]


def validate_mapping(mapping: RelationMapping, registry: RelationRegistry) -> list[str]:
    """Return human-readable violations; empty when the mapping is sound."""
    violations = []
    for src in mapping.duplicates:
        violations.append(f"source relation {src} appears more than once")
    for src, entry in sorted(mapping.entries.items()):
        if src not in registry:
            violations.append(f"unknown source relation {src}")
        for tgt in entry.targets:
            if tgt not in registry:
                violations.append(f"entry {src}: unknown target relation {tgt}")
        if entry.primary not in entry.targets:
            violations.append(f"entry {src}: primary {entry.primary} is not among its targets")
    return violations


def load_default_mapping() -> RelationMapping:
    return RelationMapping.from_file(data_path("mapping.tsv"))


def load_default_registries() -> RelationRegistry:
    """Registry with ATOMIC-2020, ATOMIC, ConceptNet and TransOMCS vocabularies.

    The default relation mapping into the ATOMIC-2020 space is attached as
    ``registry.mapping``.
    """
    registry = RelationRegistry.from_files(data_path("relations.tsv"), data_path("aliases.tsv"))
    registry.mapping = load_default_mapping()
    return registry


class KnowledgeGraph:
    """An ordered, append-only tuple collection; read-only once frozen.

    ``space`` is the relation vocabulary every tuple must use; it defaults to
    ``id`` and differs only when one KG is loaded twice under two labels.
    """

    def __init__(self, id: str, tuples: Iterable[KGTuple] = (),
                 registry: RelationRegistry | None = None, space: str | None = None):
        self.id = id
        self.space = space or id
        self.registry = registry
        self._tuples: list[KGTuple] = []
        self._ids: set[str] = set()
        self._frozen = False
        for t in tuples:
            self.add(t)

    def add(self, t: KGTuple) -> None:
        if self._frozen:
            raise RuntimeError(f"knowledge graph {self.id!r} is frozen")
        if t.relation.kg != self.space:
            raise ValueError(f"tuple {t.id!r} has relation {t.relation} outside space {self.space!r}")
        if t.id in self._ids:
            raise ValueError(f"duplicate tuple id {t.id!r} in KG {self.id!r}")
        self._ids.add(t.id)
        self._tuples.append(t)

    def freeze(self) -> "KnowledgeGraph":
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    @property
    def tuples(self) -> tuple[KGTuple, ...] | list[KGTuple]:
        return tuple(self._tuples) if self._frozen else list(self._tuples)

    def __iter__(self) -> Iterator[KGTuple]:
        return iter(self._tuples)

    def __len__(self):
        return len(self._tuples)

    def __getitem__(self, i):
        return self._tuples[i]
